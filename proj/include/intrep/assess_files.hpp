#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "intrep/experiments.hpp"
#include "intrep/io.hpp"

namespace intrep {

struct AssessFileOptions {
  std::string family = "gamma";  // two_group family
  double t0 = 5.0;               // poisson observation window
  int mc_B = 1000;
  int normal_threshold = 40;
  int m_blocks = 20;             // ph block count
  double alpha = 0.05;
  std::uint64_t seed = 20240801;
  std::optional<double> psi0;    // assess at a fixed value instead of the MLE
};

struct AssessReport {
  std::string scenario;
  std::string estimate_label;
  double estimate = 0.0;
  AssessmentResult result;
};

namespace detail {

inline AssessReport assess_pairs_file(const io::CsvTable& table, EffectKind postulated,
                                      const AssessFileOptions& opt) {
  const int c1 = table.require_column("y1");
  const int c0 = table.require_column("y0");
  PairData pairs;
  for (const auto& row : table.rows) {
    pairs.y1.push_back(row[c1]);
    pairs.y0.push_back(row[c0]);
  }
  pairs.validate();
  AssessReport rep;
  if (postulated == EffectKind::multiplicative) {
    rep.scenario = "pairs_mult";
    rep.estimate_label = "psi_hat";
    rep.estimate = opt.psi0.value_or(mult_mle(pairs));
    rep.result = assess(mult_u(pairs, rep.estimate), opt.alpha);
  } else {
    rep.scenario = "pairs_add";
    rep.estimate_label = "delta_hat";
    rep.estimate = opt.psi0.value_or(add_mle(pairs));
    rep.result = assess(add_u(pairs, rep.estimate), opt.alpha);
  }
  return rep;
}

inline AssessReport assess_two_group_file(const io::CsvTable& table,
                                          const AssessFileOptions& opt) {
  StratumData data;
  const int c_s1 = table.require_column("s1");
  const int c_s0 = table.require_column("s0");
  const int c_r1 = table.require_column("r1");
  const int c_r0 = table.require_column("r0");
  for (const auto& row : table.rows) {
    data.s1.push_back(row[c_s1]);
    data.s0.push_back(row[c_s0]);
    data.r1.push_back(static_cast<int>(row[c_r1]));
    data.r0.push_back(static_cast<int>(row[c_r0]));
  }
  AssessReport rep;
  rep.scenario = "two_group_" + opt.family;
  if (opt.family == "normal") {
    data.family = StratumFamily::normal;
    data.validate();
    const NormalEstimate est = normal_estimate(data);
    rep.estimate_label = "psi_hat";
    rep.estimate = opt.psi0.value_or(est.psi_hat);
    rep.result = assess(normal_u(data, rep.estimate, est.tau_hat), opt.alpha);
  } else if (opt.family == "poisson") {
    data.family = StratumFamily::poisson;
    data.validate();
    rep.estimate_label = "psi_hat";
    rep.estimate = opt.psi0.value_or(poisson_mle(data));
    RngStream rng(opt.seed, 0);
    rep.result = assess(poisson_u(data, rep.estimate, rng), opt.alpha);
  } else if (opt.family == "gamma") {
    data.family = StratumFamily::gamma;
    data.validate();
    rep.estimate_label = "psi_hat";
    rep.estimate = opt.psi0.value_or(gamma_mle(data));
    rep.result = assess(gamma_f_u(data, rep.estimate), opt.alpha);
  } else {
    throw ConfigError("unknown two-group family '" + opt.family + "'");
  }
  return rep;
}

inline AssessReport assess_poisson_file(const io::CsvTable& table,
                                        const AssessFileOptions& opt) {
  const int c_id = table.require_column("individual_id");
  const int c_t = table.require_column("event_time");
  std::map<long, std::vector<double>> events;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const long id = static_cast<long>(table.rows[i][c_id]);
    const double t = table.rows[i][c_t];
    if (!(t > 0.0) || t > opt.t0) {
      throw DataError("event_time outside (0, t0] at data row " + std::to_string(i + 1));
    }
    events[id].push_back(t);
  }
  CohortData cohort;
  for (auto& [id, times] : events) {
    std::sort(times.begin(), times.end());
    EventHistory h;
    h.times = std::move(times);
    h.t0 = opt.t0;
    cohort.histories.push_back(std::move(h));
  }
  cohort.validate();
  AssessReport rep;
  rep.scenario = "poisson";
  rep.estimate_label = "beta_hat";
  CohortAssessOptions copt;
  copt.mc_B = opt.mc_B;
  copt.normal_threshold = opt.normal_threshold;
  if (opt.psi0.has_value()) {
    copt.beta_override = *opt.psi0;
    rep.estimate = *opt.psi0;
  } else {
    rep.estimate = cond_mle(cohort);
    copt.beta_override = rep.estimate;
  }
  rep.result = assess_cohort(cohort, opt.alpha, copt, RngStream(opt.seed, 0));
  return rep;
}

inline AssessReport assess_ph_file(const io::CsvTable& table, const AssessFileOptions& opt) {
  const int c_time = table.require_column("time");
  const int c_status = table.require_column("status");
  std::vector<int> x_cols;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (static_cast<int>(j) != c_time && static_cast<int>(j) != c_status) {
      x_cols.push_back(static_cast<int>(j));
    }
  }
  if (x_cols.empty()) throw DataError("survival data needs at least one covariate column");
  std::vector<SurvRecord> data;
  data.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    SurvRecord rec;
    rec.y = row[c_time];
    rec.d = static_cast<int>(row[c_status]);
    for (int j : x_cols) rec.x.push_back(row[j]);
    data.push_back(std::move(rec));
  }
  AssessReport rep;
  rep.scenario = "ph";
  rep.estimate_label = "beta_hat_1";
  const PHFit fit = ph_mle(data);
  rep.estimate = fit.beta_hat(0);
  RngStream rng(opt.seed, 0);
  rep.result = assess(block_u(data, fit, opt.m_blocks, rng), opt.alpha);
  return rep;
}

}  // namespace detail

/// One-shot assessment of a user-supplied dataset under the named scenario.
inline AssessReport assess_file(const std::string& path, const std::string& scenario,
                                const AssessFileOptions& opt) {
  const io::CsvTable table = io::read_csv(path);
  if (scenario == "pairs_mult") {
    return detail::assess_pairs_file(table, EffectKind::multiplicative, opt);
  }
  if (scenario == "pairs_add") {
    return detail::assess_pairs_file(table, EffectKind::additive, opt);
  }
  if (scenario == "two_group") return detail::assess_two_group_file(table, opt);
  if (scenario == "poisson") return detail::assess_poisson_file(table, opt);
  if (scenario == "ph") return detail::assess_ph_file(table, opt);
  throw ConfigError("unknown assessment scenario '" + scenario + "'");
}

inline std::string format_assess_report(const AssessReport& rep) {
  std::ostringstream out;
  out.precision(6);
  out << "scenario:        " << rep.scenario << "\n"
      << rep.estimate_label << ":"
      << std::string(rep.estimate_label.size() < 16 ? 16 - rep.estimate_label.size() : 1, ' ')
      << rep.estimate << "\n"
      << "replicates m:    " << rep.result.m << "\n"
      << "r_u:             " << rep.result.r_u << "\n"
      << "r_comp:          " << rep.result.r_comp << "\n"
      << "p_right_u:       " << rep.result.p_right_u << "\n"
      << "p_right_comp:    " << rep.result.p_right_comp << "\n"
      << "alpha:           " << rep.result.alpha << "\n"
      << "decision (u):    " << (rep.result.reject_u ? "reject" : "no rejection") << "\n"
      << "decision (comp): " << (rep.result.reject_comp ? "reject" : "no rejection") << "\n";
  return out.str();
}

}  // namespace intrep
