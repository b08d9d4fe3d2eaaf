#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cqed/analytic.hpp"
#include "cqed/core_model.hpp"

// Fixed-step RK4 integration of the Weisskopf-Wigner amplitude equations
//   dE/dt = -i g0 e^{+i delta t} C - gamma E
//   dC/dt = -i g0 e^{-i delta t} E - kappa C
// for arbitrary detuning. Serves as an oracle independent of the closed forms.
namespace cqed {

enum class Method { RK4Fixed };

struct IntegrationConfig {
  std::optional<double> t_max;  ///< ns; default 45 / K
  std::optional<double> dt;     ///< ns; default min(1e-3, 0.02 / max(K, |delta|, g0))
  Method method = Method::RK4Fixed;
  /// Horizon used when a caller needs K t_max >= 40 and t_max falls short,
  /// in units of 1/K. Zero disables auto-extension.
  double tail_extension = 45.0;
  /// E(0); must have unit modulus. C(0) is always 0.
  complex initial_excited{1.0, 0.0};
  /// Abort threshold for |E|^2 + |C|^2 + P_out + P_spont - 1 at any node.
  double ledger_tolerance = 1e-6;
};

struct AmplitudeTrajectory {
  SystemParams params;
  double step = 0.0;
  std::vector<double> times;
  std::vector<complex> E;
  std::vector<complex> C;
  std::vector<double> P_out;    ///< 2 kappa integral |C|^2
  std::vector<double> P_spont;  ///< 2 gamma integral |E|^2
  std::vector<std::string> diagnostics;

  std::size_t size() const noexcept { return times.size(); }
  double horizon() const noexcept { return times.empty() ? 0.0 : times.back(); }

  double ledger_residual(std::size_t i) const {
    return std::norm(E[i]) + std::norm(C[i]) + P_out[i] + P_spont[i] - 1.0;
  }
  double rate(std::size_t i) const { return 2.0 * params.kappa * std::norm(C[i]); }
};

inline constexpr double kMinDecayHorizon = 40.0;  ///< required K t_max

inline double default_step(const SystemParams& p) {
  const double K = p.kappa + p.gamma;
  const double fastest = std::max({K, std::abs(p.delta), p.g0});
  return std::min(1e-3, 0.02 / fastest);
}

inline double default_horizon(const SystemParams& p) { return 45.0 / (p.kappa + p.gamma); }

/// Decay rate of the slowest amplitude eigenmode. Equals K/2 whenever the
/// resonant dynamics oscillate; smaller in the overdamped or far-detuned case.
inline double slowest_decay_rate(const SystemParams& p) {
  const complex half_split(0.5 * (p.kappa - p.gamma), -0.5 * p.delta);
  const complex root = std::sqrt(half_split * half_split - p.g0 * p.g0);
  return 0.5 * (p.kappa + p.gamma) - std::abs(root.real());
}

namespace detail {

struct OdeState {
  complex E;
  complex C;
  double P_out = 0.0;
  double P_spont = 0.0;
};

inline OdeState derivative(const SystemParams& p, double t, const OdeState& s) {
  const complex phase = std::polar(1.0, p.delta * t);
  const complex minus_i_g0(0.0, -p.g0);
  return {minus_i_g0 * phase * s.C - p.gamma * s.E,
          minus_i_g0 * std::conj(phase) * s.E - p.kappa * s.C,
          2.0 * p.kappa * std::norm(s.C), 2.0 * p.gamma * std::norm(s.E)};
}

inline OdeState axpy(const OdeState& s, double h, const OdeState& k) {
  return {s.E + h * k.E, s.C + h * k.C, s.P_out + h * k.P_out, s.P_spont + h * k.P_spont};
}

/// One classical RK4 step. The detuning phase is evaluated at each stage time.
/// The probability channels are integrated as extra state components, which
/// makes their accumulation Simpson's rule on the stage values.
inline OdeState rk4_step(const SystemParams& p, double t, const OdeState& s, double h) {
  const OdeState k1 = derivative(p, t, s);
  const OdeState k2 = derivative(p, t + 0.5 * h, axpy(s, 0.5 * h, k1));
  const OdeState k3 = derivative(p, t + 0.5 * h, axpy(s, 0.5 * h, k2));
  const OdeState k4 = derivative(p, t + h, axpy(s, h, k3));
  const double w = h / 6.0;
  return {s.E + w * (k1.E + 2.0 * k2.E + 2.0 * k3.E + k4.E),
          s.C + w * (k1.C + 2.0 * k2.C + 2.0 * k3.C + k4.C),
          s.P_out + w * (k1.P_out + 2.0 * k2.P_out + 2.0 * k3.P_out + k4.P_out),
          s.P_spont + w * (k1.P_spont + 2.0 * k2.P_spont + 2.0 * k3.P_spont + k4.P_spont)};
}

inline OdeState node_state(const AmplitudeTrajectory& traj, std::size_t i) {
  return {traj.E[i], traj.C[i], traj.P_out[i], traj.P_spont[i]};
}

}  // namespace detail

inline AmplitudeTrajectory integrate(const SystemParams& p, const IntegrationConfig& cfg = {}) {
  validate(p);
  const double t_max = cfg.t_max.value_or(default_horizon(p));
  const double dt = cfg.dt.value_or(default_step(p));
  if (!std::isfinite(t_max) || !(t_max > 0.0)) throw ValidationError("t_max", "must be > 0");
  if (!std::isfinite(dt) || !(dt > 0.0)) throw ValidationError("dt", "must be > 0");
  if (std::abs(std::abs(cfg.initial_excited) - 1.0) > 1e-12)
    throw ValidationError("initial_excited", "must have unit modulus");

  AmplitudeTrajectory traj;
  traj.params = p;

  const double fastest = std::max({p.kappa + p.gamma, std::abs(p.delta), p.g0});
  if (dt > 0.05 / fastest)
    traj.diagnostics.push_back("dt=" + std::to_string(dt) + " ns exceeds recommended bound " +
                               std::to_string(0.05 / fastest) + " ns");

  // Uniform grid ending exactly at t_max; the step never exceeds dt.
  const auto steps = static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9));
  const double h = t_max / static_cast<double>(std::max<std::size_t>(steps, 1));
  const std::size_t nodes = std::max<std::size_t>(steps, 1) + 1;
  traj.step = h;
  traj.times.reserve(nodes);
  traj.E.reserve(nodes);
  traj.C.reserve(nodes);
  traj.P_out.reserve(nodes);
  traj.P_spont.reserve(nodes);

  detail::OdeState s{cfg.initial_excited, complex(0.0, 0.0), 0.0, 0.0};
  for (std::size_t i = 0; i < nodes; ++i) {
    const double t = static_cast<double>(i) * h;
    if (i > 0) s = detail::rk4_step(p, static_cast<double>(i - 1) * h, s, h);
    traj.times.push_back(t);
    traj.E.push_back(s.E);
    traj.C.push_back(s.C);
    traj.P_out.push_back(s.P_out);
    traj.P_spont.push_back(s.P_spont);
    const double residual = traj.ledger_residual(i);
    if (!(std::abs(residual) <= cfg.ledger_tolerance)) throw LedgerViolation(i, t, residual);
  }
  return traj;
}

/// Output probability of a finished trajectory: P_out at the last node plus
/// the share of the remaining population that will still leave through the
/// cavity, using the instantaneous branching ratio.
inline double output_probability(const AmplitudeTrajectory& traj) {
  const SystemParams& p = traj.params;
  const std::size_t last = traj.size() - 1;
  const double remaining = std::norm(traj.E[last]) + std::norm(traj.C[last]);
  const double out_flux = p.kappa * std::norm(traj.C[last]);
  const double loss_flux = p.gamma * std::norm(traj.E[last]);
  if (out_flux + loss_flux > 0.0)
    return traj.P_out[last] + remaining * out_flux / (out_flux + loss_flux);
  return traj.P_out[last] + (p.gamma == 0.0 ? remaining : 0.0);
}

/// Quantum efficiency from the integrated output channel.
///
/// The horizon must reach K t >= 40; it is extended to tail_extension / K when
/// allowed. The tail left at the horizon is apportioned as in
/// output_probability, which is exact once a single decaying eigenmode remains.
inline double efficiency_numeric(const SystemParams& p, const IntegrationConfig& cfg = {}) {
  validate(p);
  const double K = p.kappa + p.gamma;
  IntegrationConfig run = cfg;
  const double t_max = cfg.t_max.value_or(default_horizon(p));
  if (K * t_max < kMinDecayHorizon) {
    if (cfg.tail_extension <= 0.0)
      throw HorizonError("K*t_max = " + std::to_string(K * t_max) +
                         " < 40 and auto-extension is disabled");
    run.t_max = std::max(cfg.tail_extension, kMinDecayHorizon) / K;
  }
  return output_probability(integrate(p, run));
}

/// S(delta) = (kappa/pi) |integral e^{i delta t} C(t) dt|^2 by the trapezoid rule
/// on the trajectory's own grid.
inline SpectrumGrid output_spectrum_numeric(const AmplitudeTrajectory& traj,
                                            std::span<const double> grid) {
  validate_detuning_grid(grid);
  const SystemParams& p = traj.params;
  // Truncating a mode that has not died out rings in the transform, so the
  // slowest mode sets the requirement (2 lambda t >= 40, i.e. K t >= 40 when
  // the system oscillates).
  const double decay = 2.0 * slowest_decay_rate(p);
  if (traj.size() < 2 || decay * traj.horizon() < kMinDecayHorizon)
    throw HorizonError("spectrum needs a trajectory with 2*lambda_slow*t_max >= 40 (got " +
                       std::to_string(decay * traj.horizon()) + ")");

  const double h = traj.step;
  const std::size_t n = traj.size();
  SpectrumGrid s;
  s.delta.assign(grid.begin(), grid.end());
  s.density.reserve(grid.size());
  for (double delta : grid) {
    const complex rotate = std::polar(1.0, delta * h);
    complex phase(1.0, 0.0);
    complex sum(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (i % 1024 == 0) phase = std::polar(1.0, delta * traj.times[i]);
      const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
      sum += w * phase * traj.C[i];
      phase *= rotate;
    }
    sum *= h;
    s.density.push_back(p.kappa / std::numbers::pi * std::norm(sum));
  }
  return s;
}

}  // namespace cqed
