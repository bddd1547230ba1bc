#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace intrep {

// ============================================================================
// Log-gamma (Lanczos approximation, g = 7, 9 coefficients)
// ============================================================================

namespace detail {
inline constexpr double kLanczosG = 7.0;
inline constexpr double kLanczos[9] = {
    0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
    771.32342877765313,       -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};
}  // namespace detail

/// Natural log of the gamma function for x > 0.
inline double log_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_gamma: requires x > 0");
  if (x < 0.5) {
    // Reflection keeps the Lanczos argument in its accurate range.
    return std::log(3.14159265358979323846 / std::sin(3.14159265358979323846 * x)) -
           log_gamma(1.0 - x);
  }
  const double z = x - 1.0;
  double a = detail::kLanczos[0];
  for (int i = 1; i < 9; ++i) a += detail::kLanczos[i] / (z + i);
  const double t = z + detail::kLanczosG + 0.5;
  return 0.91893853320467274178 + (z + 0.5) * std::log(t) - t + std::log(a);
}

// ============================================================================
// Regularized incomplete gamma P(a,x), Q(a,x)
// ============================================================================

namespace detail {

// log of the power-series sum for P(a,x); series of positive terms.
inline double inc_gamma_series_log_sum(double a, double x) {
  double sum = 1.0;
  double term = 1.0;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return std::log(sum);
}

// log of the continued-fraction factor for Q(a,x), modified Lentz.
inline double inc_gamma_cf_log(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::log(h);
}

}  // namespace detail

/// log P(a,x), regularized lower incomplete gamma; a > 0, x >= 0.
inline double log_reg_inc_gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::domain_error("reg_inc_gamma: bad arguments");
  if (x == 0.0) return -std::numeric_limits<double>::infinity();
  if (x < a + 1.0) {
    return a * std::log(x) - x - log_gamma(a + 1.0) +
           detail::inc_gamma_series_log_sum(a, x);
  }
  const double log_q =
      a * std::log(x) - x - log_gamma(a) + detail::inc_gamma_cf_log(a, x);
  return std::log1p(-std::exp(log_q));
}

/// log Q(a,x), regularized upper incomplete gamma.
inline double log_reg_inc_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::domain_error("reg_inc_gamma: bad arguments");
  if (x == 0.0) return 0.0;
  if (x >= a + 1.0) {
    return a * std::log(x) - x - log_gamma(a) + detail::inc_gamma_cf_log(a, x);
  }
  const double log_p = a * std::log(x) - x - log_gamma(a + 1.0) +
                       detail::inc_gamma_series_log_sum(a, x);
  return std::log1p(-std::exp(log_p));
}

inline double reg_inc_gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::domain_error("reg_inc_gamma: bad arguments");
  if (x == 0.0) return 0.0;
  return std::exp(log_reg_inc_gamma_p(a, x));
}

inline double reg_inc_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::domain_error("reg_inc_gamma: bad arguments");
  if (x == 0.0) return 1.0;
  return std::exp(log_reg_inc_gamma_q(a, x));
}

// ============================================================================
// Regularized incomplete beta I_x(a,b)
// ============================================================================

namespace detail {

// Continued fraction for the incomplete beta, modified Lentz.
inline double inc_beta_cf(double x, double a, double b) {
  constexpr double tiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 2000; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a,b) for x in [0,1], a,b > 0.
inline double reg_inc_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || x < 0.0 || x > 1.0) {
    throw std::domain_error("reg_inc_beta: bad arguments");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = log_gamma(a + b) - log_gamma(a) - log_gamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * detail::inc_beta_cf(x, a, b) / a;
  }
  return 1.0 - std::exp(log_front) * detail::inc_beta_cf(1.0 - x, b, a) / b;
}

// ============================================================================
// Chi-square, normal, F
// ============================================================================

/// Chi-square distribution function G_df(x).
inline double chi2_cdf(double x, int df) {
  if (df <= 0) throw std::domain_error("chi2_cdf: df must be positive");
  if (x < 0.0) throw std::domain_error("chi2_cdf: x must be nonnegative");
  if (x == 0.0) return 0.0;
  return reg_inc_gamma_p(0.5 * df, 0.5 * x);
}

/// Upper tail pr(X > x), accurate deep into the tail.
inline double chi2_sf(double x, int df) {
  if (df <= 0) throw std::domain_error("chi2_sf: df must be positive");
  if (x < 0.0) throw std::domain_error("chi2_sf: x must be nonnegative");
  if (x == 0.0) return 1.0;
  return reg_inc_gamma_q(0.5 * df, 0.5 * x);
}

/// Standard normal distribution function.
inline double normal_cdf(double z) {
  return 0.5 * std::erfc(-z * 0.70710678118654752440);
}

inline double normal_sf(double z) {
  return 0.5 * std::erfc(z * 0.70710678118654752440);
}

/// F distribution function with d1, d2 degrees of freedom.
inline double f_cdf(double x, int d1, int d2) {
  if (d1 <= 0 || d2 <= 0) throw std::domain_error("f_cdf: degrees of freedom must be positive");
  if (x < 0.0) throw std::domain_error("f_cdf: x must be nonnegative");
  if (x == 0.0) return 0.0;
  const double u = d1 * x / (d1 * x + d2);
  return reg_inc_beta(u, 0.5 * d1, 0.5 * d2);
}

/// log density of the F distribution at x > 0.
inline double f_log_density(double x, int d1, int d2) {
  if (d1 <= 0 || d2 <= 0 || !(x > 0.0)) throw std::domain_error("f_log_density: bad arguments");
  const double h1 = 0.5 * d1, h2 = 0.5 * d2;
  return h1 * std::log(static_cast<double>(d1) / d2) + (h1 - 1.0) * std::log(x) -
         (h1 + h2) * std::log1p(d1 * x / static_cast<double>(d2)) -
         (log_gamma(h1) + log_gamma(h2) - log_gamma(h1 + h2));
}

// ============================================================================
// Quantiles (bracketed inversion)
// ============================================================================

namespace detail {

// Brent iteration on cdf(x) - p; requires cdf(lo) <= p <= cdf(hi).
template <class Cdf>
double invert_monotone_cdf(const Cdf& cdf, double p, double lo, double hi, double tol) {
  double a = lo, b = hi;
  double fa = cdf(a) - p;
  double fb = cdf(b) - p;
  if (fa > 0.0 || fb < 0.0) throw std::runtime_error("invert_monotone_cdf: bad bracket");
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  double c = a, fc = fa;
  double d = b - a, e = d;
  const double eps = std::numeric_limits<double>::epsilon();
  for (int it = 0; it < 300; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a; fc = fa;
      d = e = b - a;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * eps * std::fabs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
    if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
      const double s = fb / fa;
      double pp, q;
      if (a == c) {
        pp = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double r = fb / fc;
        pp = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (pp > 0.0) q = -q;
      pp = std::fabs(pp);
      if (2.0 * pp < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
        e = d;
        d = pp / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::fabs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = cdf(b) - p;
  }
  return b;
}

}  // namespace detail

/// x with chi2_cdf(x, df) = p.
inline double chi2_quantile(double p, int df) {
  if (df <= 0) throw std::domain_error("chi2_quantile: df must be positive");
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("chi2_quantile: p must be in (0,1)");
  double hi = df + 10.0 * std::sqrt(2.0 * df) + 10.0;
  while (chi2_cdf(hi, df) < p) hi *= 2.0;
  return detail::invert_monotone_cdf([df](double x) { return chi2_cdf(x, df); }, p, 0.0,
                                     hi, 1e-12);
}

/// z with normal_cdf(z) = p.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must be in (0,1)");
  return detail::invert_monotone_cdf(static_cast<double (*)(double)>(&normal_cdf), p,
                                     -40.0, 40.0, 1e-14);
}

// ============================================================================
// Binomial helpers
// ============================================================================

inline double log_choose(int n, int k) {
  if (k < 0 || n < 0 || k > n) throw std::domain_error("log_choose: bad arguments");
  return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

/// pr(X <= k) for X ~ Binomial(n, p).
inline double binom_cdf(int k, int n, double p) {
  if (n < 0 || !(p >= 0.0 && p <= 1.0)) throw std::domain_error("binom_cdf: bad arguments");
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  if (p == 0.0) return 1.0;
  if (p == 1.0) return 0.0;
  return reg_inc_beta(1.0 - p, static_cast<double>(n - k), k + 1.0);
}

inline double binom_log_pmf(int k, int n, double p) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  if (p == 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (p == 1.0) return k == n ? 0.0 : -std::numeric_limits<double>::infinity();
  return log_choose(n, k) + k * std::log(p) + (n - k) * std::log1p(-p);
}

inline double binom_pmf(int k, int n, double p) { return std::exp(binom_log_pmf(k, n, p)); }

}  // namespace intrep
