#pragma once

#include <array>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "cqed/analysis.hpp"
#include "cqed/config.hpp"
#include "cqed/report.hpp"

// Command-line front end: efficiency | simulate | sweep | optimize | spectrum.
namespace cqed::cli {

inline constexpr std::string_view kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kValidation = 2, kNumeric = 3, kIo = 4 };

struct CommandOutput {
  std::string data;
  int exit_code = kOk;
};

namespace detail {

// Flags that mirror configuration keys one to one.
inline constexpr std::array<std::pair<const char*, const char*>, 18> kOverrides{{
    {"--g0-ghz", "g0_ghz"},
    {"--kappa-ghz", "kappa_ghz"},
    {"--gamma-ghz", "gamma_ghz"},
    {"--delta-ghz", "delta_ghz"},
    {"--gamma0-ghz", "gamma0_ghz"},
    {"--t-max-ns", "t_max_ns"},
    {"--dt-ns", "dt_ns"},
    {"--out", "out"},
    {"--format", "format"},
    {"--route", "route"},
    {"--axis", "axis"},
    {"--values", "values"},
    {"--kappa-lo-ghz", "kappa_lo_ghz"},
    {"--kappa-hi-ghz", "kappa_hi_ghz"},
    {"--delta-min-ghz", "delta_min_ghz"},
    {"--delta-max-ghz", "delta_max_ghz"},
    {"--points", "points"},
    {"--reference", "reference"},
}};

inline CommandOutput run_efficiency(const io::RunConfig& cfg) {
  const auto report = io::make_efficiency_report(io::to_params(cfg), io::to_integration(cfg));
  return {cfg.format == io::Format::Json ? io::efficiency_json(report) : io::efficiency_text(report)};
}

inline CommandOutput run_simulate(const io::RunConfig& cfg) {
  const auto traj = integrate(io::to_params(cfg), io::to_integration(cfg));
  return {cfg.format == io::Format::Json ? io::trajectory_json(traj, cfg.reference)
                                         : io::trajectory_csv(traj, cfg.reference)};
}

inline CommandOutput run_sweep(const io::RunConfig& cfg) {
  if (!cfg.axis) throw ValidationError("axis", "missing required key");
  const Axis axis = parse_axis(*cfg.axis);
  // The swept parameter need not be present in the base configuration; any
  // valid stand-in works since every point overrides it.
  io::RunConfig base_cfg = cfg;
  const double placeholder = 1.0;
  switch (axis) {
    case Axis::G0: base_cfg.g0_ghz = base_cfg.g0_ghz.value_or(placeholder); break;
    case Axis::Kappa: base_cfg.kappa_ghz = base_cfg.kappa_ghz.value_or(placeholder); break;
    case Axis::Gamma: base_cfg.gamma_ghz = base_cfg.gamma_ghz.value_or(placeholder); break;
    case Axis::Delta: break;
  }
  const SystemParams base = io::to_params(base_cfg);
  std::vector<double> values;
  values.reserve(cfg.values_ghz.size());
  for (double v : cfg.values_ghz) values.push_back(units::ghz_to_rad_per_ns(v));
  const auto result = sweep(base, axis, values, io::to_route(cfg, Route::Analytic), io::to_integration(cfg));

  CommandOutput out{cfg.format == io::Format::Json ? io::sweep_json(result) : io::sweep_csv(result)};
  for (const auto& pt : result.points) {
    if (pt.failure == FailureKind::Validation) {
      out.exit_code = kValidation;
      break;
    }
    if (pt.failure == FailureKind::Numeric) out.exit_code = kNumeric;
  }
  return out;
}

inline CommandOutput run_optimize(const io::RunConfig& cfg) {
  const SystemParams base = io::to_params(cfg, /*kappa_required=*/false);
  const std::pair bracket{units::ghz_to_rad_per_ns(cfg.kappa_lo_ghz),
                          units::ghz_to_rad_per_ns(cfg.kappa_hi_ghz)};
  const auto report = optimize_kappa(base, bracket, io::to_route(cfg, Route::Analytic));
  return {cfg.format == io::Format::Json ? io::optimization_json(report) : io::optimization_csv(report)};
}

inline CommandOutput run_spectrum(const io::RunConfig& cfg) {
  const SystemParams p = io::to_params(cfg);
  const double K = p.kappa + p.gamma;
  const double lo = cfg.delta_min_ghz ? units::ghz_to_rad_per_ns(*cfg.delta_min_ghz) : -20.0 * K;
  const double hi = cfg.delta_max_ghz ? units::ghz_to_rad_per_ns(*cfg.delta_max_ghz) : 20.0 * K;
  const auto grid = uniform_grid(lo, hi, cfg.points);
  const Route route = p.resonant() ? io::to_route(cfg, Route::Analytic) : Route::Numeric;
  IntegrationConfig ic = io::to_integration(cfg);
  if (!ic.t_max) ic.t_max = std::max(default_horizon(p), 45.0 / (2.0 * slowest_decay_rate(p)));
  const SpectrumGrid s = route == Route::Analytic ? output_spectrum_analytic(p, grid)
                                                  : output_spectrum_numeric(integrate(p, ic), grid);
  return {cfg.format == io::Format::Json ? io::spectrum_json(s) : io::spectrum_csv(s)};
}

inline void write_file(const std::string& path, const std::string& data) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(path, "cannot open for writing");
  f << data;
  f.close();
  if (!f) throw IoError(path, "write failed");
}

/// Sidecar with everything needed to reproduce a data file. Kept apart so
/// the data file itself stays byte-identical across runs.
inline std::string sidecar(const std::string& command, const io::RunConfig& cfg) {
  io::Json j;
  j["generator"] = "cqed " + std::string(kVersion);
  j["command"] = command;
  j["format"] = io::to_string(cfg.format);
  io::Json params;
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) params[key] = *v;
  };
  put("g0_ghz", cfg.g0_ghz);
  put("kappa_ghz", cfg.kappa_ghz);
  put("gamma_ghz", cfg.gamma_ghz);
  put("delta_ghz", cfg.delta_ghz);
  put("gamma0_ghz", cfg.gamma0_ghz);
  put("t_max_ns", cfg.t_max_ns);
  put("dt_ns", cfg.dt_ns);
  j["config"] = std::move(params);
  j["units"] = {{"rates", "GHz (linear frequency)"}, {"times", "ns"}};
  return j.dump(2) + "\n";
}

}  // namespace detail

/// Runs one CLI invocation and returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cavity-QED single-photon source efficiency toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    CommandOutput (*fn)(const io::RunConfig&);
  };
  const Sub subs[] = {
      {"efficiency", "Quantum efficiency breakdown, regime and pulse width", &detail::run_efficiency},
      {"simulate", "Integrate the amplitude equations and write the trajectory", &detail::run_simulate},
      {"sweep", "Emission metrics along one parameter axis", &detail::run_sweep},
      {"optimize", "Cavity decay rate maximizing the quantum efficiency", &detail::run_optimize},
      {"spectrum", "Output photon spectrum on a detuning grid", &detail::run_spectrum},
  };

  std::string config_path;
  std::vector<std::string> raw(detail::kOverrides.size());
  bool seedless = false;
  std::vector<CLI::App*> commands;
  for (const auto& s : subs) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    cmd->add_option("--config", config_path, "key=value configuration file");
    for (std::size_t i = 0; i < detail::kOverrides.size(); ++i)
      cmd->add_option(detail::kOverrides[i].first, raw[i],
                      std::string("overrides config key ") + detail::kOverrides[i].second);
    cmd->add_flag("--seedless", seedless,
                  "no-op: every command is deterministic and uses no random numbers");
    commands.push_back(cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  std::size_t which = 0;
  while (which < commands.size() && !commands[which]->parsed()) ++which;
  CLI::App* cmd = commands[which];

  try {
    io::RunConfig cfg;
    if (!config_path.empty()) cfg = io::load_config(config_path);
    for (std::size_t i = 0; i < detail::kOverrides.size(); ++i)
      if (cmd->count(detail::kOverrides[i].first) > 0)
        io::set_key(cfg, detail::kOverrides[i].second, raw[i]);

    const CommandOutput result = subs[which].fn(cfg);
    if (cfg.out) {
      detail::write_file(*cfg.out, result.data);
      detail::write_file(*cfg.out + ".meta.json", detail::sidecar(subs[which].name, cfg));
    } else {
      out << result.data;
    }
    return result.exit_code;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIo;
  }
}

}  // namespace cqed::cli
