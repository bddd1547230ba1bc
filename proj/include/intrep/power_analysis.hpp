#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "intrep/optimize.hpp"
#include "intrep/quadrature.hpp"
#include "intrep/special_functions.hpp"

namespace intrep {

/// Moments of R_j = -log U_j obtained from the distribution function of U_j
/// by integration by parts: E = int F(u)/u du, V = -2 int log(u) F(u)/u du - E^2.
struct ReplicateMoments {
  double mean;
  double variance;
};

template <class Cdf>
ReplicateMoments moments_from_cdf(Cdf&& f_u, QuadratureSpec spec = {1e-9, 400}) {
  auto mean_integrand = [&](double u) { return f_u(u) / u; };
  auto log_integrand = [&](double u) { return std::log(u) * f_u(u) / u; };
  const double e = adaptive_quad(mean_integrand, 0.0, 1.0, spec).require();
  const double lterm = adaptive_quad(log_integrand, 0.0, 1.0, spec).require();
  return {e, -2.0 * lterm - e * e};
}

/// The parametric departure family f(u) = (1 - theta) u^{-theta} on (0,1),
/// one theta per replicate; theta = 0 recovers uniformity.
struct ThetaFamily {
  std::vector<double> thetas;

  int m() const { return static_cast<int>(thetas.size()); }

  void validate() const {
    if (thetas.empty()) throw std::invalid_argument("ThetaFamily: empty");
    for (double t : thetas) {
      if (!(t >= 0.0 && t < 1.0)) throw std::domain_error("ThetaFamily: theta in [0,1)");
    }
  }

  double theta_max() const {
    double t = 0.0;
    for (double v : thetas) t = std::max(t, v);
    return t;
  }
};

struct FisherMoments {
  double e_r;  // mean of R = 2 sum R_j
  double v_r;
};

/// Closed-form moments of R = 2 sum_j R_j under the theta family:
/// E = 2 sum (1-theta_j)^{-1}, V = 4 sum (1-theta_j)^{-2}.
inline FisherMoments para_moments(const ThetaFamily& fam) {
  fam.validate();
  double e = 0.0, v = 0.0;
  for (double t : fam.thetas) {
    const double inv = 1.0 / (1.0 - t);
    e += inv;
    v += inv * inv;
  }
  return {2.0 * e, 4.0 * v};
}

/// Chernoff-type lower bound on pr(R >= k_alpha) under the theta family:
/// 1 - inf_{0<t<t_max} exp(t k_alpha) prod_j (1-theta_j)/(1-theta_j+2t),
/// with t_max = 1 - theta_max. Returns 0 when the bound is uninformative.
inline double markov_bound(const ThetaFamily& fam, double alpha) {
  fam.validate();
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("markov_bound: alpha in (0,1)");
  const double t_max = 1.0 - fam.theta_max();
  const double k_alpha = chi2_quantile(1.0 - alpha, 2 * fam.m());
  // Work with the log objective; it is convex in t.
  auto log_obj = [&](double t) {
    double g = t * k_alpha;
    for (double th : fam.thetas) {
      g += std::log(1.0 - th) - std::log(1.0 - th + 2.0 * t);
    }
    return g;
  };
  const double lo = 1e-12 * t_max, hi = t_max * (1.0 - 1e-12);
  const ScalarMax sm = maximize_scalar([&](double t) { return -log_obj(t); }, lo, hi, 1e-12);
  const double inf_log = -sm.max;
  if (inf_log >= 0.0) return 0.0;
  return 1.0 - std::exp(inf_log);
}

/// Central-limit approximation to pr(R >= k_alpha) for general replicate
/// moments mu_m = sum E(R_j), tau_m = sqrt(sum var R_j):
/// 1 - Phi((2m + 2 sqrt(m) z_alpha - 2 mu_m) / (2 tau_m)).
inline double normal_power(double mu_m, double tau_m, int m, double alpha) {
  if (!(tau_m > 0.0)) throw std::domain_error("normal_power: tau_m must be positive");
  if (m < 1) throw std::domain_error("normal_power: m must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("normal_power: alpha in (0,1)");
  const double z_alpha = normal_quantile(1.0 - alpha);
  const double arg = (2.0 * m + 2.0 * std::sqrt(static_cast<double>(m)) * z_alpha - 2.0 * mu_m) /
                     (2.0 * tau_m);
  return normal_sf(arg);
}

// ============================================================================
// Weibull-truth misspecification for the multiplicative pair model
// ============================================================================

/// Distribution function of U_j(psi0) when the pair outcomes are Weibull with
/// shape parameter `shape` and multiplicative effect psi_star:
/// F(u) = psi_star u^shape / (psi0^shape (1-u)^shape + psi_star u^shape).
inline double weibull_u_cdf(double u, double shape, double psi_star, double psi0) {
  if (!(shape > 0.0) || !(psi_star > 0.0) || !(psi0 > 0.0)) {
    throw std::domain_error("weibull_u_cdf: parameters must be positive");
  }
  if (u < 0.0 || u > 1.0) throw std::domain_error("weibull_u_cdf: u outside [0,1]");
  if (u == 0.0) return 0.0;
  if (u == 1.0) return 1.0;
  const double num = psi_star * std::pow(u, shape);
  return num / (std::pow(psi0 * (1.0 - u), shape) + num);
}

/// E(R_j) under the additive-truth / multiplicative-postulate mismatch:
/// eta log(eta) / (eta - 1) with eta = (gamma + delta) / (gamma psi0).
inline double additive_er(double gamma, double delta, double psi0) {
  if (!(gamma > 0.0) || !(psi0 > 0.0)) throw std::domain_error("additive_er: gamma, psi0 positive");
  if (!(gamma + delta > 0.0)) throw std::domain_error("additive_er: requires gamma + delta > 0");
  const double eta = (gamma + delta) / (gamma * psi0);
  const double e = eta - 1.0;
  if (std::fabs(e) < 1e-8) return 1.0 + 0.5 * e - e * e / 6.0;
  return eta * std::log(eta) / e;
}

// ============================================================================
// Plug-in limit of the ratio-likelihood maximizer under Weibull truth
// ============================================================================

/// Solves 1/psi0 = 2 psi_star shape int_0^inf z^shape /
/// ((1 + psi_star z^shape)^2 (1 + psi0 z)) dz for the limiting maximizer.
inline double weibull_plugin_psi0(double shape, double psi_star) {
  if (!(shape > 0.0) || !(psi_star > 0.0)) {
    throw std::domain_error("weibull_plugin_psi0: parameters must be positive");
  }
  auto rhs = [&](double psi0) {
    // Substitution z = v / (1 - v) maps the half-line integral onto (0,1).
    auto integrand = [&](double v) {
      const double omv = 1.0 - v;
      const double z = v / omv;
      const double zs = std::pow(z, shape);
      const double den = 1.0 + psi_star * zs;
      return zs / (den * den * (1.0 + psi0 * z) * omv * omv);
    };
    return 2.0 * psi_star * shape *
           adaptive_quad(integrand, 0.0, 1.0, {1e-11, 300}).require();
  };
  auto h = [&](double log_psi0) {
    const double psi0 = std::exp(log_psi0);
    return 1.0 / psi0 - rhs(psi0);
  };
  double lo = std::log(psi_star) - 3.0, hi = std::log(psi_star) + 3.0;
  int tries = 0;
  while (h(lo) < 0.0 && tries++ < 30) lo -= 1.0;
  while (h(hi) > 0.0 && tries++ < 60) hi += 1.0;
  if (h(lo) < 0.0 || h(hi) > 0.0) {
    throw std::runtime_error("weibull_plugin_psi0: failed to bracket the solution");
  }
  return std::exp(find_root_bracketed(h, lo, hi, 1e-11));
}

enum class PluginRule { first_order, exact };

/// log E(R_j), log V(R_j) over a (shape, psi_star) grid for the misspecified
/// multiplicative assessment; the plug-in value is psi0 = psi_star under the
/// first-order rule or the exact limiting maximizer otherwise.
struct PowerGrid {
  std::vector<double> sigma_axis;  // Weibull shape values
  std::vector<double> psi_axis;
  std::vector<std::vector<double>> log_e;  // [sigma][psi]
  std::vector<std::vector<double>> log_v;
};

inline PowerGrid heatmap_grid(const std::vector<double>& sigma_axis,
                              const std::vector<double>& psi_axis,
                              PluginRule rule = PluginRule::first_order) {
  if (sigma_axis.empty() || psi_axis.empty()) {
    throw std::invalid_argument("heatmap_grid: axes must be nonempty");
  }
  PowerGrid grid;
  grid.sigma_axis = sigma_axis;
  grid.psi_axis = psi_axis;
  grid.log_e.assign(sigma_axis.size(), std::vector<double>(psi_axis.size(), 0.0));
  grid.log_v.assign(sigma_axis.size(), std::vector<double>(psi_axis.size(), 0.0));
  for (std::size_t i = 0; i < sigma_axis.size(); ++i) {
    for (std::size_t j = 0; j < psi_axis.size(); ++j) {
      const double shape = sigma_axis[i];
      const double psi_star = psi_axis[j];
      const double psi0 = rule == PluginRule::first_order
                              ? psi_star
                              : weibull_plugin_psi0(shape, psi_star);
      const ReplicateMoments mom = moments_from_cdf(
          [&](double u) { return weibull_u_cdf(u, shape, psi_star, psi0); });
      grid.log_e[i][j] = std::log(mom.mean);
      grid.log_v[i][j] = std::log(mom.variance);
    }
  }
  return grid;
}

/// Nontrivial solution x of (x-1)^2 = 2 (1+eps) x (log x + 1/x - 1) nearest 1;
/// returns exactly 1 at eps = 0. Solved through the ratio
/// rho(x) = 2 (x log x + 1 - x) / (x-1)^2, which decreases from 2 at x -> 0
/// through 1 at x = 1 toward 0, so the root solves rho(x) = 1/(1+eps).
inline double solve_intersection_x(double eps) {
  if (!(std::fabs(eps) < 0.5)) throw std::domain_error("solve_intersection_x: |eps| < 0.5");
  if (eps == 0.0) return 1.0;
  auto rho = [](double x) {
    const double delta = x - 1.0;
    if (std::fabs(delta) < 1e-4) {
      return 1.0 - delta / 3.0 + delta * delta / 6.0 - delta * delta * delta / 10.0;
    }
    return 2.0 * (x * std::log(x) + 1.0 - x) / (delta * delta);
  };
  const double target = 1.0 / (1.0 + eps);
  auto g = [&](double x) { return rho(x) - target; };
  double lo, hi;
  if (eps > 0.0) {
    lo = 1.0;
    hi = 2.0;
    while (g(hi) > 0.0) hi *= 2.0;
  } else {
    lo = 0.5;
    hi = 1.0;
    while (g(lo) < 0.0) lo *= 0.5;
  }
  return find_root_bracketed(g, lo, hi, 1e-13);
}

}  // namespace intrep
