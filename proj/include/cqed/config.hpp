#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cqed/analysis.hpp"
#include "cqed/core_model.hpp"
#include "cqed/error.hpp"
#include "cqed/numeric.hpp"

// Flat key=value run configuration. One pair per line, '#' starts a comment,
// blank lines are ignored. All rates are linear frequencies in GHz and all
// times are in ns.
namespace cqed::io {

enum class Format { Csv, Json };

inline constexpr std::string_view to_string(Format f) noexcept {
  return f == Format::Csv ? "csv" : "json";
}

struct RunConfig {
  std::optional<double> g0_ghz;
  std::optional<double> kappa_ghz;
  std::optional<double> gamma_ghz;
  std::optional<double> delta_ghz;
  std::optional<double> gamma0_ghz;

  std::optional<double> t_max_ns;
  std::optional<double> dt_ns;

  std::optional<std::string> out;
  Format format = Format::Csv;

  // Subcommand settings.
  std::optional<std::string> route;
  std::optional<std::string> axis;
  std::vector<double> values_ghz;
  double kappa_lo_ghz = 0.1;
  double kappa_hi_ghz = 100.0;
  std::optional<double> delta_min_ghz;
  std::optional<double> delta_max_ghz;
  std::size_t points = 4001;
  bool reference = false;
};

inline double parse_double(std::string_view key, std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw ValidationError(std::string(key), "not a number: '" + std::string(text) + "'");
  return value;
}

inline std::vector<double> parse_list(std::string_view key, std::string_view text) {
  std::vector<double> values;
  while (!text.empty()) {
    const auto comma = text.find(',');
    values.push_back(parse_double(key, text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return values;
}

inline bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ValidationError(std::string(key), "expected true or false");
}

inline Format parse_format(std::string_view text) {
  if (text == "csv") return Format::Csv;
  if (text == "json") return Format::Json;
  throw ValidationError("format", "expected csv or json");
}

/// Applies one key=value pair. Unknown keys are rejected.
inline void set_key(RunConfig& cfg, std::string_view key, std::string_view value) {
  const std::string k(key);
  if (k == "g0_ghz") cfg.g0_ghz = parse_double(k, value);
  else if (k == "kappa_ghz") cfg.kappa_ghz = parse_double(k, value);
  else if (k == "gamma_ghz") cfg.gamma_ghz = parse_double(k, value);
  else if (k == "delta_ghz") cfg.delta_ghz = parse_double(k, value);
  else if (k == "gamma0_ghz") cfg.gamma0_ghz = parse_double(k, value);
  else if (k == "t_max_ns") cfg.t_max_ns = parse_double(k, value);
  else if (k == "dt_ns") cfg.dt_ns = parse_double(k, value);
  else if (k == "out") cfg.out = std::string(value);
  else if (k == "format") cfg.format = parse_format(value);
  else if (k == "route") cfg.route = std::string(value);
  else if (k == "axis") cfg.axis = std::string(value);
  else if (k == "values") cfg.values_ghz = parse_list(k, value);
  else if (k == "kappa_lo_ghz") cfg.kappa_lo_ghz = parse_double(k, value);
  else if (k == "kappa_hi_ghz") cfg.kappa_hi_ghz = parse_double(k, value);
  else if (k == "delta_min_ghz") cfg.delta_min_ghz = parse_double(k, value);
  else if (k == "delta_max_ghz") cfg.delta_max_ghz = parse_double(k, value);
  else if (k == "points") {
    const double n = parse_double(k, value);
    if (!(n >= 2.0) || n != static_cast<double>(static_cast<std::size_t>(n)))
      throw ValidationError(k, "must be an integer >= 2");
    cfg.points = static_cast<std::size_t>(n);
  } else if (k == "reference") cfg.reference = parse_bool(k, value);
  else throw ValidationError(k, "unknown configuration key");
}

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline RunConfig parse_config(std::string_view text, RunConfig cfg = {}) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ValidationError("line " + std::to_string(line_no), "expected key=value");
    set_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path, RunConfig cfg = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(cfg));
}

inline double require(const std::optional<double>& v, const char* key) {
  if (!v) throw ValidationError(key, "missing required key");
  return *v;
}

/// Converts the GHz parameters to internal angular rates and validates them.
/// `kappa_required` is false for commands that choose kappa themselves.
inline SystemParams to_params(const RunConfig& cfg, bool kappa_required = true) {
  const double g0 = require(cfg.g0_ghz, "g0_ghz");
  const double kappa = kappa_required ? require(cfg.kappa_ghz, "kappa_ghz") : cfg.kappa_ghz.value_or(1.0);
  const double gamma = require(cfg.gamma_ghz, "gamma_ghz");
  SystemParams p = SystemParams::from_ghz(g0, kappa, gamma, cfg.delta_ghz.value_or(0.0), cfg.gamma0_ghz);
  try {
    validate(p);
  } catch (const ValidationError& e) {
    // Report the external key name, not the internal field.
    throw ValidationError(e.field() + "_ghz", std::string(e.what()).substr(e.field().size() + 2));
  }
  return p;
}

inline IntegrationConfig to_integration(const RunConfig& cfg) {
  IntegrationConfig ic;
  if (cfg.t_max_ns) {
    if (!(*cfg.t_max_ns > 0.0)) throw ValidationError("t_max_ns", "must be > 0");
    ic.t_max = cfg.t_max_ns;
  }
  if (cfg.dt_ns) {
    if (!(*cfg.dt_ns > 0.0)) throw ValidationError("dt_ns", "must be > 0");
    ic.dt = cfg.dt_ns;
  }
  return ic;
}

inline Route to_route(const RunConfig& cfg, Route fallback) {
  if (!cfg.route) return fallback;
  if (*cfg.route == "analytic") return Route::Analytic;
  if (*cfg.route == "numeric") return Route::Numeric;
  throw ValidationError("route", "expected analytic or numeric");
}

}  // namespace cqed::io
