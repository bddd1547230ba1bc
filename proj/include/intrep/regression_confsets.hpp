#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "intrep/replication.hpp"
#include "intrep/rng.hpp"
#include "intrep/special_functions.hpp"

namespace intrep {

struct RegressionData {
  Eigen::MatrixXd X;
  Eigen::VectorXd Y;
  std::optional<double> sigma;  // noise SD when known

  int n() const { return static_cast<int>(X.rows()); }
  int d() const { return static_cast<int>(X.cols()); }
};

/// A postulated model: a sorted set of design-matrix column indices.
struct ModelId {
  std::vector<int> columns;

  int d0() const { return static_cast<int>(columns.size()); }

  bool operator==(const ModelId& o) const { return columns == o.columns; }

  void validate(int d) const {
    int prev = -1;
    for (int c : columns) {
      if (c <= prev || c >= d) throw std::invalid_argument("ModelId: bad column set");
      prev = c;
    }
  }
};

/// Orthonormal basis of the orthogonal complement of col(X0).
inline Eigen::MatrixXd nullspace_basis(const Eigen::MatrixXd& X0) {
  const int n = static_cast<int>(X0.rows());
  const int d0 = static_cast<int>(X0.cols());
  if (d0 == 0) return Eigen::MatrixXd::Identity(n, n);
  if (d0 >= n) throw std::invalid_argument("nullspace_basis: needs n > d0");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X0);
  if (qr.rank() < d0) throw std::runtime_error("nullspace_basis: X0 is rank deficient");
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return q.rightCols(n - d0);
}

/// Synthetic replicates Y_j = Y + sqrt(k) sigma (G_j - Gbar); their
/// projections onto any nullspace basis of a correct postulated model are
/// independent N(0, k sigma^2 I) across replicates.
inline Eigen::MatrixXd synth_replicates(const Eigen::VectorXd& Y, int k, double sigma,
                                        RngStream& rng) {
  if (k < 2) throw std::invalid_argument("synth_replicates: needs k >= 2");
  if (!(sigma > 0.0)) throw std::domain_error("synth_replicates: sigma must be positive");
  const int n = static_cast<int>(Y.size());
  Eigen::MatrixXd g(n, k);
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < n; ++i) g(i, j) = rng.std_normal();
  }
  const Eigen::VectorXd gbar = g.rowwise().mean();
  Eigen::MatrixXd out(n, k);
  const double scale = std::sqrt(static_cast<double>(k)) * sigma;
  for (int j = 0; j < k; ++j) out.col(j) = Y + scale * (g.col(j) - gbar);
  return out;
}

/// All pairwise inner products of unit vectors (columns), in (i < j) order.
inline std::vector<double> cosine_angles(const Eigen::MatrixXd& qs) {
  const int k = static_cast<int>(qs.cols());
  if (k < 2) throw std::invalid_argument("cosine_angles: needs at least two vectors");
  for (int j = 0; j < k; ++j) {
    if (std::fabs(qs.col(j).norm() - 1.0) > 1e-10) {
      throw std::domain_error("cosine_angles: columns must be unit vectors");
    }
  }
  std::vector<double> z;
  z.reserve(k * (k - 1) / 2);
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) z.push_back(qs.col(i).dot(qs.col(j)));
  }
  return z;
}

/// Distribution function of the cosine of the angle between independent
/// uniform directions in nu >= 3 dimensions:
/// F(z) = 1/2 + sign(z)/2 I_{z^2}(1/2, (nu-1)/2).
inline double fisher1915_cdf(double z, int nu) {
  if (nu < 3) throw std::domain_error("fisher1915_cdf: needs nu >= 3");
  if (z < -1.0 || z > 1.0) throw std::domain_error("fisher1915_cdf: z outside [-1,1]");
  if (z == 0.0) return 0.5;
  const double half_tail = 0.5 * reg_inc_beta(z * z, 0.5, 0.5 * (nu - 1.0));
  return z > 0.0 ? 0.5 + half_tail : 0.5 - half_tail;
}

/// Uniform replicates for one postulated model: project the synthetic
/// replicates onto the complement of col(X0), normalize, and apply the
/// cosine-angle integral transform. Projection residuals are computed from a
/// thin QR of X0; inner products agree with any explicit orthonormal basis.
inline USample model_u(const RegressionData& data, const ModelId& model, int k,
                       RngStream& rng) {
  model.validate(data.d());
  const int n = data.n();
  const int d0 = model.d0();
  if (d0 < 1) throw std::invalid_argument("model_u: empty model");
  if (n - d0 < 3) throw std::invalid_argument("model_u: needs n - d0 >= 3");
  if (!data.sigma.has_value()) throw std::invalid_argument("model_u: sigma required");

  Eigen::MatrixXd x0(n, d0);
  for (int j = 0; j < d0; ++j) x0.col(j) = data.X.col(model.columns[j]);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(x0);
  const Eigen::MatrixXd q1 = qr.householderQ() * Eigen::MatrixXd::Identity(n, d0);

  const Eigen::MatrixXd reps = synth_replicates(data.Y, k, *data.sigma, rng);
  Eigen::MatrixXd resid(n, k);
  for (int j = 0; j < k; ++j) {
    const Eigen::VectorXd y = reps.col(j);
    resid.col(j) = y - q1 * (q1.transpose() * y);
    resid.col(j) /= resid.col(j).norm();
  }

  std::vector<double> u;
  u.reserve(k * (k - 1) / 2);
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      u.push_back(fisher1915_cdf(resid.col(i).dot(resid.col(j)), n - d0));
    }
  }
  return USample(std::move(u), 0.0);
}

// ============================================================================
// Model enumeration
// ============================================================================

struct ModelRecord {
  ModelId id;
  double p_right_u = 1.0;
  double p_right_comp = 1.0;
};

struct ModelConfidenceSet {
  std::vector<ModelRecord> models;  // every tested model with its tail p-values
  double alpha = 0.0;
  int n_tested = 0;

  bool accepted_u(const ModelRecord& r) const { return r.p_right_u >= alpha; }
  bool accepted_comp(const ModelRecord& r) const { return r.p_right_comp >= alpha; }

  int count_accepted_u() const {
    int c = 0;
    for (const auto& r : models) c += accepted_u(r) ? 1 : 0;
    return c;
  }
  int count_accepted_comp() const {
    int c = 0;
    for (const auto& r : models) c += accepted_comp(r) ? 1 : 0;
    return c;
  }

  const ModelRecord* find(const ModelId& id) const {
    for (const auto& r : models) {
      if (r.id == id) return &r;
    }
    return nullptr;
  }
};

namespace detail {

template <class Visitor>
void for_each_subset(int d, int dmax, Visitor&& visit) {
  std::vector<int> comb;
  for (int d0 = 1; d0 <= dmax; ++d0) {
    comb.assign(d0, 0);
    for (int i = 0; i < d0; ++i) comb[i] = i;
    while (true) {
      visit(comb);
      int i = d0 - 1;
      while (i >= 0 && comb[i] == d - d0 + i) --i;
      if (i < 0) break;
      ++comb[i];
      for (int j = i + 1; j < d0; ++j) comb[j] = comb[j - 1] + 1;
    }
  }
}

}  // namespace detail

/// Tests every column subset of size 1..dmax; each model gets its own derived
/// randomization stream (keyed by enumeration rank), so results do not depend
/// on evaluation order.
inline ModelConfidenceSet confidence_set_models(const RegressionData& data, int dmax,
                                                int k, double alpha,
                                                const RngStream& rng) {
  if (dmax < 1 || dmax >= data.n() - 3) {
    throw std::invalid_argument("confidence_set_models: requires 1 <= dmax < n - 3");
  }
  ModelConfidenceSet out;
  out.alpha = alpha;
  std::uint64_t rank = 0;
  detail::for_each_subset(data.d(), dmax, [&](const std::vector<int>& cols) {
    ModelId id{cols};
    RngStream stream = rng.derive(rank++);
    const AssessmentResult res = assess(model_u(data, id, k, stream), alpha);
    out.models.push_back({std::move(id), res.p_right_u, res.p_right_comp});
  });
  out.n_tested = static_cast<int>(out.models.size());
  return out;
}

// ============================================================================
// Simulation design generator
// ============================================================================

struct RegressionGenSpec {
  int n = 100;
  int d = 15;
  int s = 5;               // signal columns (the leading ones)
  int a = 3;               // correlated noise columns following the signal
  double rho = 0.9;        // within-block correlation of the first s + a columns
  double theta_signal = 1.0;
};

struct GeneratedRegression {
  RegressionData data;
  ModelId true_model;
};

inline GeneratedRegression gen_regression(const RegressionGenSpec& spec, RngStream& rng) {
  if (spec.s + spec.a > spec.d || spec.s < 1) throw std::invalid_argument("gen_regression: bad spec");
  if (!(spec.rho >= 0.0 && spec.rho < 1.0)) throw std::domain_error("gen_regression: rho in [0,1)");
  GeneratedRegression out;
  out.data.X.resize(spec.n, spec.d);
  out.data.Y.resize(spec.n);
  const int block = spec.s + spec.a;
  const double w_shared = std::sqrt(spec.rho);
  const double w_own = std::sqrt(1.0 - spec.rho);
  for (int i = 0; i < spec.n; ++i) {
    const double shared = rng.std_normal();
    for (int j = 0; j < spec.d; ++j) {
      out.data.X(i, j) = (j < block) ? w_shared * shared + w_own * rng.std_normal()
                                     : rng.std_normal();
    }
    double mean = 0.0;
    for (int j = 0; j < spec.s; ++j) mean += spec.theta_signal * out.data.X(i, j);
    out.data.Y(i) = mean + rng.std_normal();
  }
  out.data.sigma = 1.0;
  out.true_model.columns.resize(spec.s);
  for (int j = 0; j < spec.s; ++j) out.true_model.columns[j] = j;
  return out;
}

}  // namespace intrep
