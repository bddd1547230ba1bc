#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "intrep/optimize.hpp"
#include "intrep/replication.hpp"
#include "intrep/rng.hpp"

namespace intrep {

/// Matched-pair outcomes: y1 treated, y0 untreated, all strictly positive.
struct PairData {
  std::vector<double> y1;
  std::vector<double> y0;

  int m() const { return static_cast<int>(y1.size()); }

  void validate() const {
    if (y1.size() != y0.size()) throw std::invalid_argument("PairData: length mismatch");
    if (y1.empty()) throw std::invalid_argument("PairData: empty");
    for (std::size_t j = 0; j < y1.size(); ++j) {
      if (!(y1[j] > 0.0) || !(y0[j] > 0.0)) {
        throw std::domain_error("PairData: outcomes must be strictly positive");
      }
    }
  }
};

enum class EffectKind { multiplicative, additive };

enum class GammaSampler { uniform01 };

/// Generator settings for Weibull pair outcomes. The rate parameterisation is
/// survival S(t) = exp(-rate * t^shape), so shape = 1 recovers an exponential
/// with that rate.
struct PairGenSpec {
  EffectKind effect_kind = EffectKind::multiplicative;
  double effect_value = 1.0;  // psi (multiplicative) or delta (additive)
  double shape = 1.0;
  GammaSampler gamma_sampler = GammaSampler::uniform01;  // law of the baseline rates
  int m = 1;

  void validate() const {
    if (!(shape > 0.0)) throw std::domain_error("PairGenSpec: shape must be positive");
    if (m < 1) throw std::domain_error("PairGenSpec: m must be >= 1");
    if (effect_kind == EffectKind::multiplicative && !(effect_value > 0.0)) {
      throw std::domain_error("PairGenSpec: multiplicative effect must be positive");
    }
  }
};

namespace detail {
inline double weibull_draw(double rate, double shape, RngStream& rng) {
  return std::pow(rng.unit_exponential() / rate, 1.0 / shape);
}
}  // namespace detail

inline PairData gen_pairs(const PairGenSpec& spec, RngStream& rng) {
  spec.validate();
  PairData data;
  data.y1.reserve(spec.m);
  data.y0.reserve(spec.m);
  for (int j = 0; j < spec.m; ++j) {
    double gamma = rng.uniform01();
    double rate1;
    if (spec.effect_kind == EffectKind::multiplicative) {
      rate1 = gamma * spec.effect_value;
    } else {
      // Redraw gamma when the treated rate would be nonpositive; with
      // delta >= 0 this never triggers.
      int tries = 0;
      while (gamma + spec.effect_value <= 0.0) {
        if (++tries > 10000) {
          throw std::domain_error("gen_pairs: additive effect incompatible with gamma draws");
        }
        gamma = rng.uniform01();
      }
      rate1 = gamma + spec.effect_value;
    }
    data.y0.push_back(detail::weibull_draw(gamma, spec.shape, rng));
    data.y1.push_back(detail::weibull_draw(rate1, spec.shape, rng));
  }
  return data;
}

// ============================================================================
// Multiplicative-rate exponential model
// ============================================================================

/// U_j = psi0 Z_j / (1 + psi0 Z_j) with Z_j = y1_j / y0_j.
inline USample mult_u(const PairData& pairs, double psi0) {
  pairs.validate();
  if (!(psi0 > 0.0)) throw std::domain_error("mult_u: psi0 must be positive");
  std::vector<double> u(pairs.y1.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double t = psi0 * pairs.y1[j] / pairs.y0[j];
    u[j] = t / (1.0 + t);
  }
  return USample(std::move(u), psi0);
}

/// Maximum likelihood for psi from the ratio density psi / (1 + psi z)^2.
inline double mult_mle(const PairData& pairs) {
  pairs.validate();
  const int m = pairs.m();
  std::vector<double> z(pairs.y1.size());
  for (std::size_t j = 0; j < z.size(); ++j) z[j] = pairs.y1[j] / pairs.y0[j];
  // Score m/psi - 2 sum z/(1+psi z), strictly decreasing in log psi.
  auto score = [&](double psi) {
    double s = m / psi;
    for (double zj : z) s -= 2.0 * zj / (1.0 + psi * zj);
    return s;
  };
  const double lo = 1e-8, hi = 1e8;
  if (score(lo) < 0.0 || score(hi) > 0.0) {
    throw std::runtime_error("mult_mle: score has no root in [1e-8, 1e8]");
  }
  // Solve in log psi so both huge and tiny estimates resolve well.
  const double log_psi = find_root_bracketed(
      [&](double t) { return score(std::exp(t)); }, std::log(lo), std::log(hi), 1e-12);
  return std::exp(log_psi);
}

// ============================================================================
// Additive-rate exponential model
// ============================================================================

namespace detail {

// Mean of an exponential(rate delta) truncated to (0, s).
inline double truncated_exp_mean(double delta, double s) {
  const double x = delta * s;
  if (std::fabs(x) < 1e-5) return s * (0.5 - x / 12.0 + x * x * x / 720.0);
  if (x > 700.0) return 1.0 / delta;
  return 1.0 / delta - s / std::expm1(x);
}

}  // namespace detail

/// U_j = (1 - e^{-delta0 y1_j}) / (1 - e^{-delta0 s_j}), s_j = y1_j + y0_j.
/// The delta0 = 0 limit is y1_j / s_j.
inline USample add_u(const PairData& pairs, double delta0) {
  pairs.validate();
  std::vector<double> u(pairs.y1.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double s = pairs.y1[j] + pairs.y0[j];
    if (delta0 == 0.0) {
      u[j] = pairs.y1[j] / s;
    } else if (delta0 > 0.0) {
      u[j] = std::expm1(-delta0 * pairs.y1[j]) / std::expm1(-delta0 * s);
    } else {
      // Negative rate: expm1(a)/expm1(b) with 0 < a < b overflows, so pull
      // out exp(a - b) first.
      const double a = -delta0 * pairs.y1[j];
      const double b = -delta0 * s;
      u[j] = std::exp(a - b) * std::expm1(-a) / std::expm1(-b);
    }
  }
  return USample(std::move(u), delta0);
}

/// Conditional maximum likelihood for delta given the pair sums.
inline double add_mle(const PairData& pairs) {
  pairs.validate();
  if (pairs.m() < 2) throw std::invalid_argument("add_mle: needs m >= 2");
  double s_min = std::numeric_limits<double>::infinity(), s_max = 0.0, y1_sum = 0.0;
  for (std::size_t j = 0; j < pairs.y1.size(); ++j) {
    const double s = pairs.y1[j] + pairs.y0[j];
    s_min = std::min(s_min, s);
    s_max = std::max(s_max, s);
    y1_sum += pairs.y1[j];
  }
  // Score sum_j E[Y1 | S = s_j; delta] - sum_j y1_j, strictly decreasing with a
  // unique real root.
  auto score = [&](double delta) {
    double s = 0.0;
    for (std::size_t j = 0; j < pairs.y1.size(); ++j) {
      s += detail::truncated_exp_mean(delta, pairs.y1[j] + pairs.y0[j]);
    }
    return s - y1_sum;
  };
  double lo = -50.0 / s_max, hi = 50.0 / s_min;
  int expansions = 0;
  while (score(lo) < 0.0 && expansions < 60) {
    lo *= 2.0;
    ++expansions;
  }
  while (score(hi) > 0.0 && expansions < 120) {
    hi *= 2.0;
    ++expansions;
  }
  if (score(lo) < 0.0 || score(hi) > 0.0) {
    throw std::runtime_error("add_mle: score has no root in the search bracket");
  }
  const double scale = 1.0 / s_max;
  return find_root_bracketed(score, lo, hi, 1e-12 * scale);
}

// ============================================================================
// Plug-in assessment
// ============================================================================

/// Fit the postulated pair model, build replicates at the estimate, and run
/// the Fisher-combination assessment.
inline AssessmentResult assess_pairs(const PairData& pairs, EffectKind postulated,
                                     double alpha) {
  if (postulated == EffectKind::multiplicative) {
    const double psi_hat = mult_mle(pairs);
    return assess(mult_u(pairs, psi_hat), alpha);
  }
  const double delta_hat = add_mle(pairs);
  return assess(add_u(pairs, delta_hat), alpha);
}

}  // namespace intrep
