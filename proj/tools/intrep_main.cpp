// Command-line front end: config-driven simulation studies, one-shot data
// assessment, power-analysis grids, and regression model confidence sets.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "intrep/assess_files.hpp"
#include "intrep/experiments.hpp"
#include "intrep/reporting.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitDataError = 3;

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<double> alpha;
  std::string out_path;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--seed", flags.seed, "Base seed for all random streams");
  cmd->add_option("--threads", flags.threads, "Worker threads for replicates");
  cmd->add_option("--alpha", flags.alpha, "Test level");
  cmd->add_option("--out", flags.out_path, "Output path (stdout when omitted)");
  cmd->add_option("--format", flags.format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
}

void emit(const std::string& content, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    intrep::write_file(out_path, content);
  }
}

int run_simulate(const std::string& config_path, const CommonFlags& flags) {
  intrep::ExperimentConfig cfg = intrep::ExperimentConfig::from_file(config_path);
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.threads) cfg.threads = *flags.threads;
  if (flags.alpha) cfg.alpha = *flags.alpha;
  cfg.validate();
  intrep::ExperimentTable table = intrep::run_experiment(cfg);
  table.manifest.config_echo = intrep::io::KeyValueFile::parse_file(config_path).echo();
  table.manifest.config_echo.emplace_back("effective_seed", std::to_string(cfg.seed));
  table.manifest.config_echo.emplace_back("effective_threads", std::to_string(cfg.threads));
  table.manifest.config_echo.emplace_back("effective_alpha",
                                          intrep::detail::format_value(cfg.alpha));
  emit(flags.format == "json" ? intrep::table_to_json(table) : intrep::table_to_csv(table),
       flags.out_path);
  const std::string manifest_path =
      flags.out_path.empty() ? "intrep_manifest.json" : flags.out_path + ".manifest.json";
  intrep::write_file(manifest_path, intrep::manifest_to_json(table));
  std::cerr << "manifest: " << manifest_path << "\n";
  return kExitOk;
}

int run_assess(const std::string& data_path, const std::string& scenario,
               const intrep::AssessFileOptions& opt, const CommonFlags& flags) {
  intrep::AssessFileOptions local = opt;
  if (flags.seed) local.seed = *flags.seed;
  if (flags.alpha) local.alpha = *flags.alpha;
  const intrep::AssessReport rep = intrep::assess_file(data_path, scenario, local);
  if (flags.format == "json") {
    nlohmann::json j;
    j["scenario"] = rep.scenario;
    j[rep.estimate_label] = rep.estimate;
    j["m"] = rep.result.m;
    j["r_u"] = rep.result.r_u;
    j["r_comp"] = rep.result.r_comp;
    j["p_right_u"] = rep.result.p_right_u;
    j["p_right_comp"] = rep.result.p_right_comp;
    j["alpha"] = rep.result.alpha;
    j["reject_u"] = rep.result.reject_u;
    j["reject_comp"] = rep.result.reject_comp;
    emit(j.dump(2) + "\n", flags.out_path);
  } else {
    emit(intrep::format_assess_report(rep), flags.out_path);
  }
  return kExitOk;
}

int run_power(const std::vector<double>& sigma_axis, const std::vector<double>& psi_axis,
              const std::string& rule, const CommonFlags& flags) {
  const intrep::PluginRule plugin_rule =
      rule == "exact" ? intrep::PluginRule::exact : intrep::PluginRule::first_order;
  const intrep::PowerGrid grid = intrep::heatmap_grid(sigma_axis, psi_axis, plugin_rule);
  std::ostringstream out;
  out << "sigma,psi,log_e,log_v\n";
  out.precision(12);
  for (std::size_t i = 0; i < grid.sigma_axis.size(); ++i) {
    for (std::size_t j = 0; j < grid.psi_axis.size(); ++j) {
      out << grid.sigma_axis[i] << "," << grid.psi_axis[j] << "," << grid.log_e[i][j] << ","
          << grid.log_v[i][j] << "\n";
    }
  }
  emit(out.str(), flags.out_path);
  return kExitOk;
}

int run_confset(const std::string& data_path, const std::string& outcome, int dmax, int k,
                bool estimate_sigma, std::optional<double> sigma, const CommonFlags& flags) {
  const intrep::io::CsvTable table = intrep::io::read_csv(data_path);
  const int c_y = table.require_column(outcome);
  const int n = static_cast<int>(table.rows.size());
  const int d = static_cast<int>(table.header.size()) - 1;
  if (d < 1) throw intrep::DataError("design matrix needs at least one column");
  intrep::RegressionData data;
  data.X.resize(n, d);
  data.Y.resize(n);
  std::vector<std::string> col_names;
  for (int i = 0; i < n; ++i) {
    int jx = 0;
    for (std::size_t j = 0; j < table.header.size(); ++j) {
      if (static_cast<int>(j) == c_y) continue;
      if (i == 0) col_names.push_back(table.header[j]);
      data.X(i, jx++) = table.rows[i][j];
    }
    data.Y(i) = table.rows[i][c_y];
  }
  if (sigma) {
    data.sigma = *sigma;
  } else if (estimate_sigma) {
    // Plug-in from full-model residuals; calibration is then approximate.
    const Eigen::VectorXd coef =
        (data.X.transpose() * data.X).ldlt().solve(data.X.transpose() * data.Y);
    const Eigen::VectorXd resid = data.Y - data.X * coef;
    if (n <= d) throw intrep::DataError("cannot estimate sigma with n <= d");
    data.sigma = std::sqrt(resid.squaredNorm() / (n - d));
  } else {
    throw intrep::ConfigError("provide --sigma or pass --estimate-sigma");
  }

  const double alpha = flags.alpha.value_or(0.05);
  intrep::RngStream rng(flags.seed.value_or(20240801), 0);
  const intrep::ModelConfidenceSet cs =
      intrep::confidence_set_models(data, dmax, k, alpha, rng);

  std::ostringstream out;
  out << "model,d0,p_right_u,p_right_comp,accepted_right,accepted_left\n";
  out.precision(12);
  int accepted_right = 0, accepted_left = 0;
  for (const auto& rec : cs.models) {
    std::string label;
    for (int c : rec.id.columns) {
      if (!label.empty()) label += "+";
      label += col_names[c];
    }
    const bool acc_u = cs.accepted_u(rec);
    const bool acc_comp = cs.accepted_comp(rec);
    accepted_right += acc_u ? 1 : 0;
    accepted_left += acc_comp ? 1 : 0;
    out << label << "," << rec.id.d0() << "," << rec.p_right_u << "," << rec.p_right_comp << ","
        << (acc_u ? 1 : 0) << "," << (acc_comp ? 1 : 0) << "\n";
  }
  emit(out.str(), flags.out_path);
  std::cerr << "models tested: " << cs.n_tested << ", accepted (right tail): " << accepted_right
            << ", accepted (left tail): " << accepted_left << ", sigma: " << *data.sigma << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Internal-replication model assessment"};
  app.require_subcommand(1);

  CommonFlags flags;

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run a config-driven simulation study");
  std::string config_path;
  simulate->add_option("--config", config_path, "Experiment config file")->required();
  add_common(simulate, flags);

  // assess
  auto* assess = app.add_subcommand("assess", "Assess a dataset under a postulated model");
  std::string data_path, scenario;
  intrep::AssessFileOptions aopt;
  assess->add_option("--data", data_path, "Input CSV")->required();
  assess
      ->add_option("--scenario", scenario,
                   "One of pairs_mult, pairs_add, two_group, poisson, ph")
      ->required();
  assess->add_option("--family", aopt.family, "Two-group family: normal, poisson, gamma");
  assess->add_option("--t0", aopt.t0, "Poisson observation window end");
  assess->add_option("--mc-B", aopt.mc_B, "Monte Carlo replicates for the conditional CDF");
  assess->add_option("--normal-threshold", aopt.normal_threshold,
                     "Event count at which the normal approximation takes over");
  assess->add_option("--m-blocks", aopt.m_blocks, "Block count for the hazards assessment");
  double psi0_flag;
  auto* psi0_opt = assess->add_option("--at", psi0_flag,
                                      "Assess at this parameter value instead of the estimate");
  add_common(assess, flags);

  // power
  auto* power = app.add_subcommand("power", "Emit the misspecification power grid as CSV");
  std::vector<double> sigma_axis{0.5, 0.65, 0.8, 0.95, 1.1, 1.25, 1.4, 1.7, 2.0};
  std::vector<double> psi_axis{0.5, 0.75, 1.0, 1.5, 2.0};
  std::string rule = "first_order";
  power->add_option("--sigma", sigma_axis, "Weibull shape grid")->delimiter(',');
  power->add_option("--psi", psi_axis, "True effect grid")->delimiter(',');
  power->add_option("--rule", rule, "Plug-in rule: first_order or exact")
      ->check(CLI::IsMember({"first_order", "exact"}));
  add_common(power, flags);

  // confset
  auto* confset = app.add_subcommand("confset", "Model confidence set for a regression dataset");
  std::string cs_data, outcome = "y";
  int dmax = 5, k = 4;
  bool estimate_sigma = false;
  std::optional<double> sigma;
  double sigma_flag;
  confset->add_option("--data", cs_data, "CSV with design columns and an outcome column")
      ->required();
  confset->add_option("--outcome", outcome, "Outcome column name (default y)");
  confset->add_option("--dmax", dmax, "Largest model size to enumerate");
  confset->add_option("--k", k, "Synthetic replicates per model");
  auto* sigma_opt = confset->add_option("--sigma", sigma_flag, "Known noise SD");
  confset->add_flag("--estimate-sigma", estimate_sigma,
                    "Estimate sigma from full-model residuals");
  add_common(confset, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulate(config_path, flags);
    if (assess->parsed()) {
      if (psi0_opt->count() > 0) aopt.psi0 = psi0_flag;
      return run_assess(data_path, scenario, aopt, flags);
    }
    if (power->parsed()) return run_power(sigma_axis, psi_axis, rule, flags);
    if (confset->parsed()) {
      if (sigma_opt->count() > 0) sigma = sigma_flag;
      return run_confset(cs_data, outcome, dmax, k, estimate_sigma, sigma, flags);
    }
  } catch (const intrep::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const intrep::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
