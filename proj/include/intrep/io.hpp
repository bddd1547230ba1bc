#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace intrep {

/// Invalid experiment configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (CLI exit code 3).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace io {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

inline double parse_double(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError(context + ": cannot parse '" + s + "' as a number");
  }
}

inline long parse_long(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError(context + ": cannot parse '" + s + "' as an integer");
  }
}

// ----------------------------------------------------------------------------
// key = value configuration files; '#' starts a comment, lists are
// comma-separated. Unknown keys are reported with their line number.
// ----------------------------------------------------------------------------

struct ConfigEntry {
  std::string value;
  int line = 0;
  mutable bool used = false;
};

class KeyValueFile {
 public:
  static KeyValueFile parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
  }

  static KeyValueFile parse_text(const std::string& text, const std::string& name = "<config>") {
    KeyValueFile kv;
    kv.name_ = name;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(name + ":" + std::to_string(lineno) + ": expected 'key = value'");
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) {
        throw ConfigError(name + ":" + std::to_string(lineno) + ": empty key");
      }
      if (kv.entries_.count(key)) {
        throw ConfigError(name + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
      }
      kv.entries_[key] = {value, lineno, false};
    }
    return kv;
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.used = true;
    return it->second.value;
  }

  std::string require_string(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError(name_ + ": missing required key '" + key + "'");
    it->second.used = true;
    return it->second.value;
  }

  double get_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return parse_checked_double(key);
  }

  long get_long(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    return parse_checked_long(key);
  }

  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const {
    if (!has(key)) return fallback;
    const auto it = entries_.find(key);
    it->second.used = true;
    std::vector<double> out;
    for (const auto& tok : split(it->second.value, ',')) {
      if (tok.empty()) throw field_error(key, "empty list element");
      out.push_back(parse_field_double(key, tok));
    }
    if (out.empty()) throw field_error(key, "empty list");
    return out;
  }

  std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const {
    if (!has(key)) return fallback;
    const auto it = entries_.find(key);
    it->second.used = true;
    std::vector<int> out;
    for (const auto& tok : split(it->second.value, ',')) {
      if (tok.empty()) throw field_error(key, "empty list element");
      const double v = parse_field_double(key, tok);
      if (v != static_cast<int>(v)) throw field_error(key, "expected integer, got '" + tok + "'");
      out.push_back(static_cast<int>(v));
    }
    if (out.empty()) throw field_error(key, "empty list");
    return out;
  }

  /// Every key must have been consumed by a getter; leftovers are mistakes.
  void reject_unknown_keys() const {
    for (const auto& [key, entry] : entries_) {
      if (!entry.used) {
        throw ConfigError(name_ + ":" + std::to_string(entry.line) + ": unknown key '" + key +
                          "'");
      }
    }
  }

  std::vector<std::pair<std::string, std::string>> echo() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [key, entry] : entries_) out.emplace_back(key, entry.value);
    return out;
  }

 private:
  ConfigError field_error(const std::string& key, const std::string& msg) const {
    const auto it = entries_.find(key);
    return ConfigError(name_ + ":" + std::to_string(it->second.line) + ": key '" + key + "': " +
                       msg);
  }

  double parse_checked_double(const std::string& key) const {
    const auto it = entries_.find(key);
    it->second.used = true;
    return parse_field_double(key, it->second.value);
  }

  long parse_checked_long(const std::string& key) const {
    const auto it = entries_.find(key);
    it->second.used = true;
    const double v = parse_field_double(key, it->second.value);
    if (v != static_cast<long>(v)) throw field_error(key, "expected integer");
    return static_cast<long>(v);
  }

  double parse_field_double(const std::string& key, const std::string& tok) const {
    try {
      std::size_t pos = 0;
      const double v = std::stod(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw field_error(key, "cannot parse '" + tok + "' as a number");
    }
  }

  std::string name_;
  std::map<std::string, ConfigEntry> entries_;
};

// ----------------------------------------------------------------------------
// Minimal CSV reading: first row is a header, fields are numeric.
// ----------------------------------------------------------------------------

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == name) return static_cast<int>(j);
    }
    return -1;
  }

  int require_column(const std::string& name) const {
    const int j = column(name);
    if (j < 0) throw DataError("missing column '" + name + "'");
    return j;
  }
};

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file: " + path);
  CsvTable table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (table.header.empty()) {
      table.header = fields;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw DataError(path + ": row " + std::to_string(lineno) + ": expected " +
                      std::to_string(table.header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      row[j] = parse_double(fields[j], path + ": row " + std::to_string(lineno) + ", column '" +
                                           table.header[j] + "'");
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw DataError(path + ": empty file");
  return table;
}

}  // namespace io
}  // namespace intrep
