#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "intrep/special_functions.hpp"

namespace intrep {

// Uniform replicates are clamped away from exact 0/1 before any logs are
// taken; this preserves p-value ordering while preventing infinities.
inline constexpr double kUniformClamp = 1e-15;

/// A set of standard-uniform replicates together with the parameter value
/// (postulated or plugged-in) used to construct them.
struct USample {
  std::vector<double> values;
  double psi_tag = 0.0;

  USample() = default;
  USample(std::vector<double> vals, double tag) : values(std::move(vals)), psi_tag(tag) {
    if (values.empty()) throw std::invalid_argument("USample: needs at least one value");
    for (double& v : values) {
      if (!std::isfinite(v)) throw std::domain_error("USample: non-finite value");
      if (v < kUniformClamp) v = kUniformClamp;
      if (v > 1.0 - kUniformClamp) v = 1.0 - kUniformClamp;
    }
  }

  int m() const { return static_cast<int>(values.size()); }

  /// Replicates mapped u -> 1-u; same tag.
  USample complement() const {
    std::vector<double> comp(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) comp[i] = 1.0 - values[i];
    return USample(std::move(comp), psi_tag);
  }
};

/// Fisher combination statistic -2 sum log u_j.
inline double fisher_statistic(const USample& u) {
  double s = 0.0;
  for (double v : u.values) {
    if (!(v > 0.0 && v < 1.0)) throw std::domain_error("fisher_statistic: value outside (0,1)");
    s += std::log(v);
  }
  const double r = -2.0 * s;
  if (!std::isfinite(r)) throw std::domain_error("fisher_statistic: non-finite statistic");
  return r;
}

/// -2 sum log(1-u_j), computed without forming 1-u.
inline double fisher_statistic_complement(const USample& u) {
  double s = 0.0;
  for (double v : u.values) {
    if (!(v > 0.0 && v < 1.0)) throw std::domain_error("fisher_statistic: value outside (0,1)");
    s += std::log1p(-v);
  }
  const double r = -2.0 * s;
  if (!std::isfinite(r)) throw std::domain_error("fisher_statistic: non-finite statistic");
  return r;
}

/// Fisher statistics for u and 1-u with their upper-tail chi-square p-values.
///
/// "right" sensitivity refers to the u statistic (mass of u near 0), "left"
/// to the complement statistic (mass near 1).
struct AssessmentResult {
  double r_u = 0.0;
  double r_comp = 0.0;
  double p_right_u = 1.0;
  double p_right_comp = 1.0;
  bool reject_u = false;
  bool reject_comp = false;
  double alpha = 0.0;
  int m = 0;
};

inline AssessmentResult assess(const USample& u, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("assess: alpha must be in (0,1)");
  AssessmentResult res;
  res.alpha = alpha;
  res.m = u.m();
  res.r_u = fisher_statistic(u);
  res.r_comp = fisher_statistic_complement(u);
  const int df = 2 * res.m;
  res.p_right_u = chi2_sf(res.r_u, df);
  res.p_right_comp = chi2_sf(res.r_comp, df);
  res.reject_u = res.p_right_u < alpha;
  res.reject_comp = res.p_right_comp < alpha;
  return res;
}

/// Grid scan for a scalar interest parameter: a grid point is accepted when
/// both upper-tail p-values are at least alpha/2. An empty accepted set is a
/// model-rejection signal.
struct ConfidenceSet1D {
  std::vector<double> grid;
  std::vector<char> accepted;  // same length as grid
  double alpha = 0.0;

  bool empty() const {
    for (char a : accepted) {
      if (a) return false;
    }
    return true;
  }
};

template <class Builder>
ConfidenceSet1D confidence_set_scan(Builder&& builder, const std::vector<double>& grid,
                                    double alpha) {
  if (grid.empty()) throw std::invalid_argument("confidence_set_scan: empty grid");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("confidence_set_scan: grid must be strictly increasing");
    }
  }
  ConfidenceSet1D cs;
  cs.grid = grid;
  cs.alpha = alpha;
  cs.accepted.resize(grid.size(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const USample u = builder(grid[i]);
    const AssessmentResult res = assess(u, alpha);
    const double p_min = std::min(res.p_right_u, res.p_right_comp);
    cs.accepted[i] = p_min >= 0.5 * alpha ? 1 : 0;
  }
  return cs;
}

}  // namespace intrep
