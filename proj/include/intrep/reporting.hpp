#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "intrep/experiments.hpp"

namespace intrep {

inline nlohmann::json rows_to_json(const ExperimentTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ResultRow& row : table.rows) {
    nlohmann::json r;
    r["scenario"] = table.scenario;
    for (const auto& [key, value] : row.cell) r[key] = value;
    r["direction"] = row.direction;
    r["metric"] = row.metric;
    r["value"] = row.value;
    r["mc_se"] = row.mc_se;
    r["replications"] = row.replications;
    r["seed"] = row.seed;
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::string table_to_json(const ExperimentTable& table) {
  return rows_to_json(table).dump(2) + "\n";
}

/// Manifest: config echo, artifact version, wall time, and the result rows
/// (each row carries its Monte Carlo standard error).
inline std::string manifest_to_json(const ExperimentTable& table) {
  nlohmann::json m;
  m["artifact_version"] = table.manifest.version;
  m["scenario"] = table.manifest.scenario;
  m["wall_seconds"] = table.manifest.wall_seconds;
  nlohmann::json cfg = nlohmann::json::object();
  for (const auto& [key, value] : table.manifest.config_echo) cfg[key] = value;
  m["config"] = cfg;
  m["rows"] = rows_to_json(table);
  return m.dump(2) + "\n";
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write to " + path);
  out << content;
}

}  // namespace intrep
