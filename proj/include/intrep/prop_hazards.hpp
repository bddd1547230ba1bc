#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "intrep/replication.hpp"
#include "intrep/rng.hpp"
#include "intrep/special_functions.hpp"

namespace intrep {

/// One survival record: observed time y = min(T, c), event indicator d,
/// covariate vector x.
struct SurvRecord {
  double y = 0.0;
  int d = 1;
  std::vector<double> x;
};

struct PartialLikValue {
  double loglik = 0.0;
  Eigen::VectorXd score;
  Eigen::MatrixXd info;  // negative Hessian (observed information)
};

struct PHFit {
  Eigen::VectorXd beta_hat;
  double loglik = 0.0;
  Eigen::MatrixXd observed_info;
  int iterations = 0;
};

namespace detail {

inline void validate_surv(const std::vector<SurvRecord>& data) {
  if (data.empty()) throw std::invalid_argument("survival data: empty");
  const std::size_t p = data.front().x.size();
  if (p == 0) throw std::invalid_argument("survival data: needs at least one covariate");
  for (const auto& r : data) {
    if (!(r.y > 0.0)) throw std::domain_error("survival data: times must be positive");
    if (r.d != 0 && r.d != 1) throw std::domain_error("survival data: status must be 0 or 1");
    if (r.x.size() != p) throw std::invalid_argument("survival data: ragged covariates");
  }
}

// Processing order for risk-set accumulation: decreasing time, censored
// records ahead of events at equal times so they join the risk set first.
inline std::vector<int> risk_order(const std::vector<SurvRecord>& data) {
  std::vector<int> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (data[a].y != data[b].y) return data[a].y > data[b].y;
    return data[a].d < data[b].d;
  });
  return idx;
}

}  // namespace detail

/// Cox partial log-likelihood with analytic gradient and observed information.
/// Event times must be distinct; censored records enter risk sets only.
inline PartialLikValue partial_loglik(const std::vector<SurvRecord>& data,
                                      const Eigen::VectorXd& beta) {
  detail::validate_surv(data);
  const int n = static_cast<int>(data.size());
  const int p = static_cast<int>(data.front().x.size());
  if (beta.size() != p) throw std::invalid_argument("partial_loglik: beta dimension mismatch");

  const std::vector<int> order = detail::risk_order(data);

  // Linear predictors, centered by their maximum so risk sums cannot overflow.
  Eigen::VectorXd eta(n);
  for (int i = 0; i < n; ++i) {
    double e = 0.0;
    for (int k = 0; k < p; ++k) e += data[i].x[k] * beta[k];
    eta[i] = e;
  }
  const double eta_max = eta.maxCoeff();

  PartialLikValue out;
  out.score = Eigen::VectorXd::Zero(p);
  out.info = Eigen::MatrixXd::Zero(p, p);

  double s0 = 0.0;
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(p);
  Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd xi(p), xbar(p);

  double prev_event_time = -1.0;
  for (int j = 0; j < n; ++j) {
    const SurvRecord& rec = data[order[j]];
    for (int k = 0; k < p; ++k) xi[k] = rec.x[k];
    const double w = std::exp(eta[order[j]] - eta_max);
    s0 += w;
    s1.noalias() += w * xi;
    s2.noalias() += w * xi * xi.transpose();
    if (rec.d == 1) {
      if (rec.y == prev_event_time) {
        throw std::runtime_error("partial_loglik: tied event times are not supported");
      }
      prev_event_time = rec.y;
      out.loglik += eta[order[j]] - eta_max - std::log(s0);
      xbar = s1 / s0;
      out.score += xi - xbar;
      out.info.noalias() += s2 / s0 - xbar * xbar.transpose();
    }
  }
  return out;
}

/// Newton iteration with step-halving; converges when the score norm falls
/// below 1e-8 n. Monotone likelihood (separation) is reported as an error.
inline PHFit ph_mle(const std::vector<SurvRecord>& data) {
  detail::validate_surv(data);
  const int n = static_cast<int>(data.size());
  const int p = static_cast<int>(data.front().x.size());
  int events = 0;
  for (const auto& r : data) events += r.d;
  if (events < p + 1) throw std::invalid_argument("ph_mle: needs at least p + 1 events");

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  PartialLikValue cur = partial_loglik(data, beta);
  const double tol = 1e-8 * n;
  PHFit fit;
  for (int it = 1; it <= 100; ++it) {
    if (cur.score.norm() <= tol) {
      fit.beta_hat = beta;
      fit.loglik = cur.loglik;
      fit.observed_info = cur.info;
      fit.iterations = it - 1;
      return fit;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cur.info);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error("ph_mle: observed information not positive-definite");
    }
    const Eigen::VectorXd step = llt.solve(cur.score);
    // Step-halving tolerates rounding-level decreases; near the optimum the
    // log-likelihood changes sit below the summation noise floor.
    const double noise = 1e-9 * (1.0 + std::fabs(cur.loglik));
    double scale = 1.0;
    for (int halvings = 0; halvings < 40; ++halvings) {
      const Eigen::VectorXd cand = beta + scale * step;
      PartialLikValue next = partial_loglik(data, cand);
      if (next.loglik >= cur.loglik - noise || halvings == 39) {
        beta = cand;
        cur = std::move(next);
        break;
      }
      scale *= 0.5;
    }
    if (beta.cwiseAbs().maxCoeff() > 50.0) {
      throw std::runtime_error("ph_mle: estimate diverging, likely monotone likelihood");
    }
  }
  throw std::runtime_error("ph_mle: no convergence after 100 iterations");
}

/// Random equal-size blocks; per block the self-contained partial-likelihood
/// score and observed information at the supplied fit, turned into uniform
/// replicates via the normal (p = 1) or chi-square (p > 1) integral transform.
inline USample block_u(const std::vector<SurvRecord>& data, const PHFit& fit,
                       int m_blocks, RngStream& rng) {
  detail::validate_surv(data);
  const int n = static_cast<int>(data.size());
  const int p = static_cast<int>(fit.beta_hat.size());
  if (m_blocks < 2) throw std::invalid_argument("block_u: needs at least 2 blocks");
  if (m_blocks > n) throw std::invalid_argument("block_u: more blocks than records");

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(i + 1)));
    std::swap(perm[i], perm[j]);
  }

  std::vector<double> u;
  u.reserve(m_blocks);
  const int base = n / m_blocks;
  const int extra = n % m_blocks;
  int pos = 0;
  for (int b = 0; b < m_blocks; ++b) {
    const int size = base + (b < extra ? 1 : 0);
    std::vector<SurvRecord> block;
    block.reserve(size);
    int events = 0;
    for (int i = 0; i < size; ++i) {
      block.push_back(data[perm[pos++]]);
      events += block.back().d;
    }
    if (events < p + 1) {
      throw std::runtime_error("block_u: block has too few events for the score transform");
    }
    const PartialLikValue pl = partial_loglik(block, fit.beta_hat);
    if (p == 1) {
      const double info = pl.info(0, 0);
      if (!(info > 0.0)) throw std::runtime_error("block_u: degenerate block information");
      u.push_back(normal_cdf(pl.score(0) / std::sqrt(info)));
    } else {
      Eigen::LLT<Eigen::MatrixXd> llt(pl.info);
      if (llt.info() != Eigen::Success) {
        throw std::runtime_error("block_u: degenerate block information");
      }
      const double q = pl.score.dot(llt.solve(pl.score));
      u.push_back(chi2_cdf(q, p));
    }
  }
  return USample(std::move(u), p == 1 ? fit.beta_hat(0) : 0.0);
}

inline AssessmentResult assess_ph(const std::vector<SurvRecord>& data, int m_blocks,
                                  double alpha, RngStream& rng) {
  const PHFit fit = ph_mle(data);
  return assess(block_u(data, fit, m_blocks, rng), alpha);
}

// ============================================================================
// Survival data generators (tests and simulation harness)
// ============================================================================

/// Proportional hazards truth with Weibull baseline H0(t) = t^shape and
/// standard normal covariates; censoring times are exponential with the given
/// rate (0 disables censoring).
struct PHGenSpec {
  int n = 100;
  std::vector<double> beta{1.0};
  double shape = 1.0;
  double censor_rate = 0.0;
};

inline std::vector<SurvRecord> gen_ph(const PHGenSpec& spec, RngStream& rng) {
  if (spec.n < 1 || spec.beta.empty() || !(spec.shape > 0.0)) {
    throw std::domain_error("gen_ph: bad spec");
  }
  const int p = static_cast<int>(spec.beta.size());
  std::vector<SurvRecord> data(spec.n);
  for (auto& rec : data) {
    rec.x.resize(p);
    double eta = 0.0;
    for (int k = 0; k < p; ++k) {
      rec.x[k] = rng.std_normal();
      eta += rec.x[k] * spec.beta[k];
    }
    const double t = std::pow(rng.unit_exponential() / std::exp(eta), 1.0 / spec.shape);
    if (spec.censor_rate > 0.0) {
      const double c = rng.unit_exponential() / spec.censor_rate;
      rec.y = std::min(t, c);
      rec.d = t <= c ? 1 : 0;
    } else {
      rec.y = t;
      rec.d = 1;
    }
  }
  return data;
}

/// Non-proportional alternative: hazard rate0 e^{growth t} e^{(1 + t) x} with
/// scalar standard normal covariate and administrative censoring at t_cap.
/// The slowly rising baseline spreads events across the window, where the
/// effective log hazard ratio 1 + t varies; the cap is required because the
/// cumulative hazard is bounded when growth + x < 0.
inline std::vector<SurvRecord> gen_ph_timevarying(int n, double t_cap, RngStream& rng,
                                                  double rate0 = 0.01,
                                                  double growth = 1.0) {
  if (n < 1 || !(t_cap > 0.0) || !(rate0 > 0.0)) {
    throw std::domain_error("gen_ph_timevarying: bad arguments");
  }
  std::vector<SurvRecord> data(n);
  for (auto& rec : data) {
    const double x = rng.std_normal();
    const double e = rng.unit_exponential();
    // Solve e = H(t | x) = rate0 e^x (e^{t (growth + x)} - 1) / (growth + x).
    const double slope = growth + x;
    double t;
    if (std::fabs(slope) < 1e-12) {
      t = e / (rate0 * std::exp(x));
    } else {
      const double arg = e * slope * std::exp(-x) / rate0;
      t = (arg > -1.0) ? std::log1p(arg) / slope : std::numeric_limits<double>::infinity();
    }
    rec.x = {x};
    if (t <= t_cap) {
      rec.y = t;
      rec.d = 1;
    } else {
      rec.y = t_cap;
      rec.d = 0;
    }
  }
  return data;
}

}  // namespace intrep
