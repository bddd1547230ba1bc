#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "intrep/optimize.hpp"
#include "intrep/replication.hpp"
#include "intrep/rng.hpp"
#include "intrep/special_functions.hpp"

namespace intrep {

enum class StratumFamily { normal, poisson, gamma };

/// Per-stratum sufficient statistics for unbalanced two-group data.
///
/// s1, s0 hold within-group means for the normal family and within-group sums
/// for the poisson and gamma families; r1, r0 are the group sizes.
struct StratumData {
  std::vector<double> s1;
  std::vector<double> s0;
  std::vector<int> r1;
  std::vector<int> r0;
  StratumFamily family = StratumFamily::normal;

  int m() const { return static_cast<int>(s1.size()); }

  void validate() const {
    const std::size_t n = s1.size();
    if (s0.size() != n || r1.size() != n || r0.size() != n) {
      throw std::invalid_argument("StratumData: field length mismatch");
    }
    if (n == 0) throw std::invalid_argument("StratumData: empty");
    for (std::size_t j = 0; j < n; ++j) {
      if (r1[j] < 1 || r0[j] < 1) throw std::domain_error("StratumData: group sizes must be >= 1");
      if (family == StratumFamily::poisson) {
        if (s1[j] < 0.0 || s0[j] < 0.0 || s1[j] != std::floor(s1[j]) ||
            s0[j] != std::floor(s0[j])) {
          throw std::domain_error("StratumData: poisson counts must be nonnegative integers");
        }
      }
      if (family == StratumFamily::gamma && (!(s1[j] > 0.0) || !(s0[j] > 0.0))) {
        throw std::domain_error("StratumData: gamma sums must be strictly positive");
      }
    }
  }
};

// ============================================================================
// Normal means
// ============================================================================

/// U_j = Phi((Z_j - psi_hat) / sqrt(tau_hat (1/r_j1 + 1/r_j0))), Z_j = s1 - s0.
inline USample normal_u(const StratumData& strata, double psi_hat, double tau_hat) {
  strata.validate();
  if (strata.family != StratumFamily::normal) throw std::invalid_argument("normal_u: wrong family");
  if (!(tau_hat > 0.0)) throw std::domain_error("normal_u: tau_hat must be positive");
  std::vector<double> u(strata.s1.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double z = strata.s1[j] - strata.s0[j];
    const double var = tau_hat * (1.0 / strata.r1[j] + 1.0 / strata.r0[j]);
    u[j] = normal_cdf((z - psi_hat) / std::sqrt(var));
  }
  return USample(std::move(u), psi_hat);
}

struct NormalEstimate {
  double psi_hat;
  double tau_hat;
};

/// Precision-weighted estimates: psi_hat = sum w_j Z_j / sum w_j with
/// w_j = (1/r_j1 + 1/r_j0)^{-1}, tau_hat = sum w_j (Z_j - psi_hat)^2 / (m-1).
inline NormalEstimate normal_estimate(const StratumData& strata) {
  strata.validate();
  if (strata.family != StratumFamily::normal) throw std::invalid_argument("normal_estimate: wrong family");
  const int m = strata.m();
  if (m < 2) throw std::invalid_argument("normal_estimate: needs m >= 2");
  double wsum = 0.0, wz = 0.0;
  for (int j = 0; j < m; ++j) {
    const double w = 1.0 / (1.0 / strata.r1[j] + 1.0 / strata.r0[j]);
    wsum += w;
    wz += w * (strata.s1[j] - strata.s0[j]);
  }
  const double psi_hat = wz / wsum;
  double ss = 0.0;
  for (int j = 0; j < m; ++j) {
    const double w = 1.0 / (1.0 / strata.r1[j] + 1.0 / strata.r0[j]);
    const double dz = strata.s1[j] - strata.s0[j] - psi_hat;
    ss += w * dz * dz;
  }
  const double tau_hat = ss / (m - 1);
  if (!(tau_hat > 0.0)) throw std::runtime_error("normal_estimate: degenerate data, all Z equal");
  return {psi_hat, tau_hat};
}

// ============================================================================
// Poisson counts
// ============================================================================

/// Randomized probability integral transform of the conditional binomial law
/// of S_j1 given S_j1 + S_j0; exactly uniform under the null.
inline USample poisson_u(const StratumData& strata, double psi0, RngStream& rng) {
  strata.validate();
  if (strata.family != StratumFamily::poisson) throw std::invalid_argument("poisson_u: wrong family");
  if (!(psi0 > 0.0)) throw std::domain_error("poisson_u: psi0 must be positive");
  std::vector<double> u(strata.s1.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    const int s1 = static_cast<int>(strata.s1[j]);
    const int n = s1 + static_cast<int>(strata.s0[j]);
    const double pi = strata.r1[j] * psi0 / (strata.r1[j] * psi0 + strata.r0[j]);
    const double v = rng.uniform01();
    u[j] = binom_cdf(s1 - 1, n, pi) + v * binom_pmf(s1, n, pi);
  }
  return USample(std::move(u), psi0);
}

/// Conditional-binomial maximum likelihood for psi; solved in log psi.
inline double poisson_mle(const StratumData& strata) {
  strata.validate();
  if (strata.family != StratumFamily::poisson) throw std::invalid_argument("poisson_mle: wrong family");
  double tot1 = 0.0, tot0 = 0.0, tot = 0.0;
  for (std::size_t j = 0; j < strata.s1.size(); ++j) {
    tot1 += strata.s1[j];
    tot0 += strata.s0[j];
    tot += strata.s1[j] + strata.s0[j];
  }
  if (tot < 1.0) throw std::invalid_argument("poisson_mle: needs at least one event");
  if (tot1 == 0.0 || tot0 == 0.0) {
    throw std::runtime_error("poisson_mle: estimate on the boundary, all events in one group");
  }
  // Score sum_j [s1_j - n_j pi_j(psi)], strictly decreasing in psi.
  auto score = [&](double log_psi) {
    const double psi = std::exp(log_psi);
    double s = 0.0;
    for (std::size_t j = 0; j < strata.s1.size(); ++j) {
      const double n = strata.s1[j] + strata.s0[j];
      const double pi = strata.r1[j] * psi / (strata.r1[j] * psi + strata.r0[j]);
      s += strata.s1[j] - n * pi;
    }
    return s;
  };
  double lo = -40.0, hi = 40.0;
  if (score(lo) < 0.0 || score(hi) > 0.0) {
    throw std::runtime_error("poisson_mle: score has no root in the search bracket");
  }
  return std::exp(find_root_bracketed(score, lo, hi, 1e-13));
}

// ============================================================================
// Gamma (exponential strata, F pivot)
// ============================================================================

/// U_j = F-cdf(r_j0 psi0 s1_j / (r_j1 s0_j); 2 r_j1, 2 r_j0).
inline USample gamma_f_u(const StratumData& strata, double psi0) {
  strata.validate();
  if (strata.family != StratumFamily::gamma) throw std::invalid_argument("gamma_f_u: wrong family");
  if (!(psi0 > 0.0)) throw std::domain_error("gamma_f_u: psi0 must be positive");
  std::vector<double> u(strata.s1.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double w = strata.r0[j] * psi0 * strata.s1[j] / (strata.r1[j] * strata.s0[j]);
    u[j] = f_cdf(w, 2 * strata.r1[j], 2 * strata.r0[j]);
  }
  return USample(std::move(u), psi0);
}

/// Maximizes sum_j log[psi f_F(psi W_j; 2 r_j1, 2 r_j0)], W_j = r_j0 s1_j/(r_j1 s0_j).
inline double gamma_mle(const StratumData& strata) {
  strata.validate();
  if (strata.family != StratumFamily::gamma) throw std::invalid_argument("gamma_mle: wrong family");
  std::vector<double> w(strata.s1.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    w[j] = strata.r0[j] * strata.s1[j] / (static_cast<double>(strata.r1[j]) * strata.s0[j]);
  }
  // The log-likelihood is concave in log psi; its derivative there is
  // sum_j [r1_j - (r1_j + r0_j) a_j psi / (1 + a_j psi)], a_j = r1_j w_j / r0_j.
  auto score = [&](double log_psi) {
    const double psi = std::exp(log_psi);
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double a = strata.r1[j] * w[j] / strata.r0[j];
      const double frac = a * psi / (1.0 + a * psi);
      s += strata.r1[j] - (strata.r1[j] + strata.r0[j]) * frac;
    }
    return s;
  };
  const double lo = std::log(1e-8), hi = std::log(1e8);
  if (score(lo) < 0.0 || score(hi) > 0.0) {
    throw std::runtime_error("gamma_mle: score has no root in [1e-8, 1e8]");
  }
  return std::exp(find_root_bracketed(score, lo, hi, 1e-13));
}

// ============================================================================
// Stratified data generators (used by the simulation harness)
// ============================================================================

struct StrataGenSpec {
  StratumFamily family = StratumFamily::normal;
  double psi = 1.0;       // mean shift (normal) or rate ratio (poisson, gamma)
  double tau = 1.0;       // normal within-group variance
  double gamma_lo = 0.5;  // baseline parameter range, gamma_j ~ U(lo, hi)
  double gamma_hi = 1.5;
  int r_max = 4;          // group sizes drawn uniformly from {1..r_max}
  int m = 1;
};

inline StratumData gen_strata(const StrataGenSpec& spec, RngStream& rng) {
  if (spec.m < 1) throw std::domain_error("gen_strata: m must be >= 1");
  if (spec.r_max < 1) throw std::domain_error("gen_strata: r_max must be >= 1");
  StratumData data;
  data.family = spec.family;
  data.s1.resize(spec.m);
  data.s0.resize(spec.m);
  data.r1.resize(spec.m);
  data.r0.resize(spec.m);
  for (int j = 0; j < spec.m; ++j) {
    const int r1 = 1 + static_cast<int>(rng.uniform_below(spec.r_max));
    const int r0 = 1 + static_cast<int>(rng.uniform_below(spec.r_max));
    const double gamma = spec.gamma_lo + (spec.gamma_hi - spec.gamma_lo) * rng.uniform01();
    data.r1[j] = r1;
    data.r0[j] = r0;
    switch (spec.family) {
      case StratumFamily::normal: {
        double a = 0.0, b = 0.0;
        for (int i = 0; i < r1; ++i) a += gamma + spec.psi + std::sqrt(spec.tau) * rng.std_normal();
        for (int i = 0; i < r0; ++i) b += gamma + std::sqrt(spec.tau) * rng.std_normal();
        data.s1[j] = a / r1;
        data.s0[j] = b / r0;
        break;
      }
      case StratumFamily::poisson: {
        auto poisson_draw = [&](double rate) {
          // Inversion by summing exponential gaps; rates here are small.
          int count = 0;
          double acc = rng.unit_exponential();
          while (acc < rate) {
            ++count;
            acc += rng.unit_exponential();
          }
          return count;
        };
        int a = 0, b = 0;
        for (int i = 0; i < r1; ++i) a += poisson_draw(gamma * spec.psi);
        for (int i = 0; i < r0; ++i) b += poisson_draw(gamma);
        data.s1[j] = a;
        data.s0[j] = b;
        break;
      }
      case StratumFamily::gamma: {
        double a = 0.0, b = 0.0;
        for (int i = 0; i < r1; ++i) a += rng.unit_exponential() / (gamma * spec.psi);
        for (int i = 0; i < r0; ++i) b += rng.unit_exponential() / gamma;
        data.s1[j] = a;
        data.s0[j] = b;
        break;
      }
    }
  }
  return data;
}

}  // namespace intrep
