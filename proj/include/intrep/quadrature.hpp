#pragma once

#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

namespace intrep {

struct QuadratureSpec {
  double abs_tol = 1e-8;
  int max_depth = 200;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;   // estimated absolute error
  bool converged = false;
  int evaluations = 0;

  double require() const {
    if (!converged) throw std::runtime_error("adaptive_quad: failed to reach tolerance");
    return value;
  }
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1,1] (positive half; all interior).
inline constexpr double kGK15Nodes[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
inline constexpr double kGK15Weights[8] = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278};
inline constexpr double kG7Weights[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694};

template <class F>
void gk15(const F& f, double a, double b, double& value, double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kGK15Nodes[i]);
    fv[14 - i] = f(c + h * kGK15Nodes[i]);
  }
  fv[7] = f(c);
  double kron = kGK15Weights[7] * fv[7];
  for (int i = 0; i < 7; ++i) kron += kGK15Weights[i] * (fv[i] + fv[14 - i]);
  double gauss = kG7Weights[3] * fv[7];
  for (int i = 0; i < 3; ++i) {
    // Gauss nodes sit at the odd Kronrod abscissae.
    gauss += kG7Weights[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  }
  value = kron * h;
  err = std::fabs((kron - gauss) * h);
}

struct QuadSegment {
  double a, b, value, err;
  int depth;
  bool operator<(const QuadSegment& o) const { return err < o.err; }
};

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over (lo, hi).
///
/// Only interior nodes are used, so integrable endpoint singularities are
/// handled by repeated bisection toward the endpoint. Bisection of any one
/// segment stops at spec.max_depth; convergence means the summed error
/// estimate meets spec.abs_tol.
template <class F>
QuadResult adaptive_quad(F&& f, double lo, double hi, QuadratureSpec spec = {}) {
  if (!(spec.abs_tol > 0.0)) throw std::domain_error("adaptive_quad: abs_tol must be positive");
  if (spec.max_depth < 10) throw std::domain_error("adaptive_quad: max_depth must be >= 10");
  if (!(lo < hi)) {
    if (lo == hi) return {0.0, 0.0, true, 0};
    throw std::domain_error("adaptive_quad: requires lo <= hi");
  }

  QuadResult out;
  std::priority_queue<detail::QuadSegment> active;
  double total = 0.0, active_err = 0.0, frozen_err = 0.0;

  auto push_segment = [&](double a, double b, int depth) {
    detail::QuadSegment seg{a, b, 0.0, 0.0, depth};
    detail::gk15(f, a, b, seg.value, seg.err);
    out.evaluations += 15;
    if (!std::isfinite(seg.value)) {
      throw std::runtime_error("adaptive_quad: non-finite integrand value");
    }
    total += seg.value;
    // A segment becomes unsplittable at the depth cap or once its width
    // reaches the local floating-point resolution.
    const double width_floor = std::numeric_limits<double>::epsilon() *
                               std::max(std::fabs(a), std::fabs(b));
    if (seg.depth >= spec.max_depth || (b - a) <= width_floor) {
      frozen_err += seg.err;
    } else {
      active_err += seg.err;
      active.push(seg);
    }
  };

  push_segment(lo, hi, 0);
  const long max_splits = 50L * spec.max_depth;
  long splits = 0;
  while (active_err + frozen_err > spec.abs_tol && !active.empty()) {
    // Frozen error alone above tolerance can never be repaired.
    if (frozen_err > spec.abs_tol || splits >= max_splits) break;
    ++splits;
    const detail::QuadSegment worst = active.top();
    active.pop();
    total -= worst.value;
    active_err -= worst.err;
    const double mid = 0.5 * (worst.a + worst.b);
    push_segment(worst.a, mid, worst.depth + 1);
    push_segment(mid, worst.b, worst.depth + 1);
  }

  out.value = total;
  out.error = active_err + frozen_err;
  out.converged = out.error <= spec.abs_tol;
  return out;
}

}  // namespace intrep
