#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "intrep/optimize.hpp"
#include "intrep/replication.hpp"
#include "intrep/rng.hpp"
#include "intrep/special_functions.hpp"

namespace intrep {

/// Ordered event times for one individual on (0, t0].
struct EventHistory {
  std::vector<double> times;
  double t0 = 0.0;

  int m() const { return static_cast<int>(times.size()); }

  double sum_times() const {
    double s = 0.0;
    for (double t : times) s += t;
    return s;
  }

  void validate() const {
    if (!(t0 > 0.0)) throw std::domain_error("EventHistory: t0 must be positive");
    double prev = 0.0;
    for (double t : times) {
      if (!(t > prev) || t > t0) throw std::domain_error("EventHistory: times must be increasing in (0, t0]");
      prev = t;
    }
  }
};

struct CohortData {
  std::vector<EventHistory> histories;

  int n() const { return static_cast<int>(histories.size()); }

  double t0() const {
    if (histories.empty()) throw std::invalid_argument("CohortData: empty");
    return histories.front().t0;
  }

  long total_events() const {
    long s = 0;
    for (const auto& h : histories) s += h.m();
    return s;
  }

  void validate() const {
    if (histories.empty()) throw std::invalid_argument("CohortData: empty");
    const double t = histories.front().t0;
    for (const auto& h : histories) {
      h.validate();
      if (h.t0 != t) throw std::invalid_argument("CohortData: histories must share t0");
    }
  }
};

// ============================================================================
// Simulation on the transformed time scale
// ============================================================================

/// Log-linear intensity exp(gamma_i + beta t): unit-exponential arrivals on
/// the transformed scale tau(t) = e^gamma (e^{beta t} - 1) / beta, inverted.
inline EventHistory simulate_loglinear(double gamma_i, double beta, double t0,
                                       RngStream& rng) {
  if (!(t0 > 0.0)) throw std::domain_error("simulate_loglinear: t0 must be positive");
  EventHistory h;
  h.t0 = t0;
  const double eg = std::exp(gamma_i);
  const double tau_end = (beta == 0.0) ? eg * t0 : eg * std::expm1(beta * t0) / beta;
  double acc = rng.unit_exponential();
  while (acc < tau_end) {
    const double t =
        (beta == 0.0) ? acc / eg : std::log1p(beta * acc / eg) / beta;
    h.times.push_back(t);
    acc += rng.unit_exponential();
  }
  return h;
}

/// Power-law intensity e^gamma t^rho, rho > -1.
inline EventHistory simulate_powerlaw(double gamma_i, double rho, double t0,
                                      RngStream& rng) {
  if (!(t0 > 0.0)) throw std::domain_error("simulate_powerlaw: t0 must be positive");
  if (!(rho > -1.0)) throw std::domain_error("simulate_powerlaw: requires rho > -1");
  EventHistory h;
  h.t0 = t0;
  const double eg = std::exp(gamma_i);
  const double p1 = rho + 1.0;
  const double tau_end = eg * std::pow(t0, p1) / p1;
  double acc = rng.unit_exponential();
  while (acc < tau_end) {
    h.times.push_back(std::pow(p1 * acc / eg, 1.0 / p1));
    acc += rng.unit_exponential();
  }
  return h;
}

// ============================================================================
// Single-event law given the count
// ============================================================================

/// Distribution function (e^{beta t} - 1) / (e^{beta t0} - 1) on [0, t0].
inline double event_cdf(double t, double beta, double t0) {
  if (!(t0 > 0.0)) throw std::domain_error("event_cdf: t0 must be positive");
  if (t < 0.0 || t > t0) throw std::domain_error("event_cdf: t must be in [0, t0]");
  if (beta == 0.0) return t / t0;
  return std::expm1(beta * t) / std::expm1(beta * t0);
}

/// Inverse of event_cdf.
inline double event_quantile(double u, double beta, double t0) {
  if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("event_quantile: u must be in [0,1]");
  if (beta == 0.0) return u * t0;
  return std::log1p(u * std::expm1(beta * t0)) / beta;
}

struct EventTimeMoments {
  double mean;
  double var;
};

/// Mean and variance of the single-event time; cumulants of the tilted
/// uniform density on (0, t0).
inline EventTimeMoments event_time_moments(double beta, double t0) {
  if (!(t0 > 0.0)) throw std::domain_error("event_time_moments: t0 must be positive");
  const double x = beta * t0;
  if (std::fabs(x) < 0.25) {
    const double x2 = x * x;
    const double mean = t0 * (0.5 + x / 12.0 - x * x2 / 720.0 + x2 * x2 * x / 30240.0);
    const double var =
        t0 * t0 * (1.0 / 12.0 - x2 / 240.0 + x2 * x2 / 6048.0 - x2 * x2 * x2 / 172800.0);
    return {mean, var};
  }
  const double em = std::expm1(x);
  const double u = std::isinf(em) ? 0.0 : 1.0 / em;
  const double mean = t0 * (1.0 + u - 1.0 / x);
  const double var = t0 * t0 * (1.0 / (x * x) - u * (1.0 + u));
  return {mean, var};
}

namespace detail {

// log(x / (e^x - 1)); equals 0 at x = 0, finite for all real x.
inline double log_x_over_expm1(double x) {
  if (std::fabs(x) < 1e-5) return -0.5 * x - x * x / 24.0;
  if (x > 700.0) return std::log(x) - x;
  if (x > 0.0) return std::log(x) - std::log(std::expm1(x));
  return std::log(-x) - std::log(-std::expm1(x));
}

}  // namespace detail

// ============================================================================
// Conditional likelihood for beta
// ============================================================================

/// sum_i m_i log(beta / (e^{beta t0} - 1)) + beta sum_ij t_ij.
inline double cond_loglik(const CohortData& cohort, double beta) {
  cohort.validate();
  const double t0 = cohort.t0();
  double m_total = 0.0, t_total = 0.0;
  for (const auto& h : cohort.histories) {
    m_total += h.m();
    t_total += h.sum_times();
  }
  return m_total * (detail::log_x_over_expm1(beta * t0) - std::log(t0)) + beta * t_total;
}

/// Analytic derivative of cond_loglik in beta.
inline double cond_score(const CohortData& cohort, double beta) {
  cohort.validate();
  double m_total = 0.0, t_total = 0.0;
  for (const auto& h : cohort.histories) {
    m_total += h.m();
    t_total += h.sum_times();
  }
  return t_total - m_total * event_time_moments(beta, cohort.t0()).mean;
}

/// Conditional maximum likelihood: solves mean event time = mu_T(beta).
inline double cond_mle(const CohortData& cohort) {
  cohort.validate();
  double m_total = 0.0, t_total = 0.0;
  for (const auto& h : cohort.histories) {
    m_total += h.m();
    t_total += h.sum_times();
  }
  if (m_total < 1.0) throw std::runtime_error("cond_mle: no events in cohort");
  const double t0 = cohort.t0();
  const double mean_t = t_total / m_total;
  // mu_T is strictly increasing in beta with range (0, t0).
  auto h = [&](double beta) { return event_time_moments(beta, t0).mean - mean_t; };
  double lo = -1.0, hi = 1.0;
  int tries = 0;
  while (h(lo) > 0.0 && tries++ < 60) lo *= 2.0;
  while (h(hi) < 0.0 && tries++ < 120) hi *= 2.0;
  if (h(lo) > 0.0 || h(hi) < 0.0) {
    throw std::runtime_error("cond_mle: mean event time too extreme to solve");
  }
  return find_root_bracketed(h, lo, hi, 1e-12);
}

// ============================================================================
// Conditional sum distribution F_{S|M}
// ============================================================================

struct ExactCondCdf {
  double value = 0.0;
  double condition = 1.0;  // max |term| over |result| in the alternating sum
  bool reliable = true;
};

namespace detail {

// Alternating-sum evaluation for negative trend b = -beta > 0, all terms
// assembled in log space:
//   F = (1 - e^{-b t0})^{-m} sum_v C(m,v) (-1)^v e^{-b v t0} P(m, b (s - v t0)).
inline ExactCondCdf cond_sum_cdf_negative(double s, int m, double b, double t0) {
  const double log_norm = m * std::log(-std::expm1(-b * t0));
  const int vmax = static_cast<int>(std::floor(s / t0));
  std::vector<double> log_terms;
  log_terms.reserve(vmax + 1);
  for (int v = 0; v <= vmax && v <= m; ++v) {
    const double y = s - v * t0;
    if (y <= 0.0) break;
    log_terms.push_back(log_choose(m, v) - b * v * t0 +
                        log_reg_inc_gamma_p(static_cast<double>(m), b * y) - log_norm);
  }
  double lmax = -std::numeric_limits<double>::infinity();
  for (double lt : log_terms) lmax = std::max(lmax, lt);
  double signed_sum = 0.0, abs_sum = 0.0;
  for (std::size_t v = 0; v < log_terms.size(); ++v) {
    const double t = std::exp(log_terms[v] - lmax);
    signed_sum += (v % 2 == 0) ? t : -t;
    abs_sum += t;
  }
  ExactCondCdf out;
  if (signed_sum <= 0.0) {
    out.value = 0.0;
    out.condition = std::numeric_limits<double>::infinity();
    out.reliable = false;
    return out;
  }
  out.condition = abs_sum / signed_sum;
  out.reliable = out.condition <= 1e12;
  out.value = std::exp(lmax) * signed_sum;
  if (out.value > 1.0) out.value = 1.0;
  return out;
}

// Irwin-Hall limit at beta = 0, scaled to (0, t0).
inline ExactCondCdf cond_sum_cdf_uniform(double s, int m, double t0) {
  const int vmax = static_cast<int>(std::floor(s / t0));
  std::vector<double> log_terms;
  for (int v = 0; v <= vmax && v <= m; ++v) {
    const double y = (s - v * t0) / t0;
    if (y <= 0.0) break;
    log_terms.push_back(log_choose(m, v) + m * std::log(y) - log_gamma(m + 1.0));
  }
  double lmax = -std::numeric_limits<double>::infinity();
  for (double lt : log_terms) lmax = std::max(lmax, lt);
  double signed_sum = 0.0, abs_sum = 0.0;
  for (std::size_t v = 0; v < log_terms.size(); ++v) {
    const double t = std::exp(log_terms[v] - lmax);
    signed_sum += (v % 2 == 0) ? t : -t;
    abs_sum += t;
  }
  ExactCondCdf out;
  if (signed_sum <= 0.0) {
    out.value = 0.0;
    out.condition = std::numeric_limits<double>::infinity();
    out.reliable = false;
    return out;
  }
  out.condition = abs_sum / signed_sum;
  out.reliable = out.condition <= 1e12;
  out.value = std::min(1.0, std::exp(lmax) * signed_sum);
  return out;
}

}  // namespace detail

/// Exact conditional distribution of the event-time sum given the count.
///
/// The inner gamma integrals decay only for negative trend, so positive beta
/// is handled by the reflection t -> t0 - t, which maps (s, beta) to
/// (m t0 - s, -beta) and the CDF to its complement. The condition number of
/// the alternating sum is reported; callers should fall back to Monte Carlo
/// when `reliable` is false.
inline ExactCondCdf cond_sum_cdf_exact(double s, int m, double beta, double t0) {
  if (m < 1) throw std::domain_error("cond_sum_cdf_exact: m must be positive");
  if (!(t0 > 0.0)) throw std::domain_error("cond_sum_cdf_exact: t0 must be positive");
  if (s < 0.0 || s > m * t0) throw std::domain_error("cond_sum_cdf_exact: s outside [0, m t0]");
  if (s == 0.0) return {0.0, 1.0, true};
  if (s == m * t0) return {1.0, 1.0, true};
  if (std::fabs(beta) * t0 < 1e-13) return detail::cond_sum_cdf_uniform(s, m, t0);
  if (beta < 0.0) return detail::cond_sum_cdf_negative(s, m, -beta, t0);
  ExactCondCdf mirrored = detail::cond_sum_cdf_negative(m * t0 - s, m, beta, t0);
  mirrored.value = 1.0 - mirrored.value;
  return mirrored;
}

/// One draw of a sum of m event times.
inline double sample_cond_sum(int m, double beta, double t0, RngStream& rng) {
  double s = 0.0;
  for (int j = 0; j < m; ++j) s += event_quantile(rng.uniform01(), beta, t0);
  return s;
}

/// Randomized Monte Carlo rank U = (#{replicate sums < s} + V) / (B + 1);
/// exactly uniform under the null by exchangeability.
inline double cond_sum_cdf_mc(double s, int m, double beta, double t0, int B,
                              RngStream& rng) {
  if (B < 1) throw std::domain_error("cond_sum_cdf_mc: B must be >= 1");
  if (m < 1) throw std::domain_error("cond_sum_cdf_mc: m must be positive");
  int below = 0;
  for (int b = 0; b < B; ++b) {
    if (sample_cond_sum(m, beta, t0, rng) < s) ++below;
  }
  return (below + rng.uniform01()) / (B + 1.0);
}

/// Normal approximation Phi((s - m mu_T) / sqrt(m sigma^2_T)).
inline double cond_sum_cdf_normal(double s, int m, double beta, double t0) {
  if (m < 1) throw std::domain_error("cond_sum_cdf_normal: m must be positive");
  const EventTimeMoments mom = event_time_moments(beta, t0);
  return normal_cdf((s - m * mom.mean) / std::sqrt(m * mom.var));
}

// ============================================================================
// Cohort assessment
// ============================================================================

struct CohortAssessOptions {
  int mc_B = 1000;
  int normal_threshold = 40;
  std::optional<double> beta_override;
};

/// Builds U_i = F_{S|M}(S_i | m_i; beta) per individual and runs the Fisher
/// combination. Individuals with no events carry no information about the
/// conditional law and are skipped; the chi-square degrees of freedom count
/// only contributing individuals. Per-individual randomization streams are
/// derived from the passed stream by individual index.
inline AssessmentResult assess_cohort(const CohortData& cohort, double alpha,
                                      const CohortAssessOptions& opt, const RngStream& rng) {
  cohort.validate();
  if (opt.mc_B < 1) throw std::domain_error("assess_cohort: mc_B must be >= 1");
  const double t0 = cohort.t0();
  const double beta =
      opt.beta_override.has_value() ? *opt.beta_override : cond_mle(cohort);
  std::vector<double> u;
  u.reserve(cohort.histories.size());
  for (std::size_t i = 0; i < cohort.histories.size(); ++i) {
    const EventHistory& h = cohort.histories[i];
    if (h.m() == 0) continue;
    const double s = h.sum_times();
    if (h.m() < opt.normal_threshold) {
      RngStream stream_i = rng.derive(static_cast<std::uint64_t>(i));
      u.push_back(cond_sum_cdf_mc(s, h.m(), beta, t0, opt.mc_B, stream_i));
    } else {
      u.push_back(cond_sum_cdf_normal(s, h.m(), beta, t0));
    }
  }
  if (u.empty()) throw std::runtime_error("assess_cohort: no individuals with events");
  return assess(USample(std::move(u), beta), alpha);
}

}  // namespace intrep
