#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "cqed/analytic.hpp"
#include "cqed/core_model.hpp"
#include "cqed/numeric.hpp"

namespace cqed {

struct EmissionMetrics {
  double eta_q = 0.0;
  double peak_time = 0.0;  ///< ns
  double peak_rate = 0.0;  ///< 1/ns
  double fwhm = 0.0;       ///< ns, primary lobe only
  /// The rate climbs back above half maximum after the primary lobe.
  bool multi_lobe = false;
  RegimeLabel regime;
  EfficiencyBreakdown breakdown;
};

enum class Route { Analytic, Numeric };

inline constexpr std::string_view to_string(Route r) noexcept {
  return r == Route::Analytic ? "analytic" : "numeric";
}

// ---------------------------------------------------------------------------
// One-dimensional search primitives.

struct GoldenResult {
  double x = 0.0;
  double value = 0.0;
  int iterations = 0;
};

/// Maximizes a unimodal f on [lo, hi] until the bracket is narrower than tol.
template <class F>
GoldenResult golden_section_maximize(F&& f, double lo, double hi, double tol,
                                     int max_iterations = 500) {
  constexpr double inv_phi = 0.6180339887498949;  // 1 / golden ratio
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  int it = 0;
  while (b - a > tol && it < max_iterations) {
    ++it;
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x), it};
}

/// Root of f on [lo, hi] given a sign change, to absolute tolerance tol.
template <class F>
double bisect(F&& f, double lo, double hi, double tol, int max_iterations = 200) {
  double flo = f(lo);
  for (int i = 0; i < max_iterations && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Pulse shape.

namespace detail {

struct PulseShape {
  double peak_time = 0.0;
  double peak_rate = 0.0;
  double left = 0.0;
  double right = 0.0;
  std::size_t right_sample = 0;  ///< first sample at or below half maximum
};

/// Peak and half-maximum crossings of `rate` sampled at `t` (ascending,
/// starting at 0). The sampled maximum is refined by golden section between
/// its neighbours; the crossings nearest the peak are refined by bisection.
template <class Rate>
PulseShape primary_lobe(Rate&& rate, const std::vector<double>& t, const std::vector<double>& n) {
  const auto j = static_cast<std::size_t>(std::max_element(n.begin(), n.end()) - n.begin());
  if (!(n[j] > 0.0)) throw NumericError("degenerate pulse: emission rate is identically zero");

  const double lo = t[j == 0 ? 0 : j - 1];
  const double hi = t[std::min(j + 1, t.size() - 1)];
  const double span = t.back() - t.front();
  PulseShape s;
  const GoldenResult peak = golden_section_maximize(rate, lo, hi, 1e-13 * span);
  s.peak_time = peak.x;
  s.peak_rate = std::max(peak.value, n[j]);
  if (n[j] > peak.value) s.peak_time = t[j];

  const double half = 0.5 * s.peak_rate;
  auto above = [&](double x) { return rate(x) - half; };
  const double tol = 1e-14 * span + 1e-300;

  std::size_t l = j;
  while (l > 0 && n[l] > half) --l;
  s.left = bisect(above, t[l], t[l + 1], tol);

  std::size_t r = j;
  while (r + 1 < n.size() && n[r] > half) ++r;
  if (n[r] > half) throw NumericError("pulse does not fall below half maximum within the horizon");
  s.right = bisect(above, t[r - 1], t[r], tol);
  s.right_sample = r;
  return s;
}

}  // namespace detail

/// Peak, FWHM and efficiency of the resonant emission rate n(t).
///
/// The search window is [0, 45/K], cut at the first zero pi/g of the rate when
/// the dynamics oscillate; the primary lobe always lies inside it. Later lobes
/// are copies of the primary one damped by e^{-K pi/g}, which sets multi_lobe.
inline EmissionMetrics pulse_metrics(const SystemParams& p) {
  detail::require_resonant(p);
  const DerivedRates d = derive_rates(p);
  double window = default_horizon(p);
  if (d.g_squared > 0.0) window = std::min(window, std::numbers::pi / std::sqrt(d.g_squared));

  auto rate = [&](double t) {
    return detail::rate_from_kernel(p, detail::damped_kernel(d.g_squared, d.K, t));
  };
  constexpr std::size_t samples = 2049;
  std::vector<double> t(samples), n(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    t[i] = window * static_cast<double>(i) / static_cast<double>(samples - 1);
    n[i] = rate(t[i]);
  }
  const auto shape = detail::primary_lobe(rate, t, n);

  EmissionMetrics m;
  m.breakdown = efficiency(p);
  m.eta_q = m.breakdown.eta_q;
  m.peak_time = shape.peak_time;
  m.peak_rate = shape.peak_rate;
  m.fwhm = shape.right - shape.left;
  m.multi_lobe = d.g_squared > 0.0 && std::exp(-d.K * std::numbers::pi / std::sqrt(d.g_squared)) > 0.5;
  m.regime = classify_regime(p, d);
  return m;
}

/// Pulse metrics from an integrated trajectory (any detuning). Off-grid
/// rates come from a single RK4 step from the preceding node.
inline EmissionMetrics pulse_metrics(const AmplitudeTrajectory& traj) {
  if (traj.size() < 3) throw ValidationError("trajectory", "needs at least three nodes");
  const SystemParams& p = traj.params;
  auto rate = [&](double t) {
    const double clamped = std::clamp(t, 0.0, traj.horizon());
    auto i = static_cast<std::size_t>(clamped / traj.step);
    i = std::min(i, traj.size() - 1);
    const auto s = detail::rk4_step(p, traj.times[i], detail::node_state(traj, i), clamped - traj.times[i]);
    return 2.0 * p.kappa * std::norm(s.C);
  };
  std::vector<double> n(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) n[i] = traj.rate(i);
  const auto shape = detail::primary_lobe(rate, traj.times, n);

  EmissionMetrics m;
  m.breakdown = efficiency(p);
  m.eta_q = output_probability(traj);
  m.peak_time = shape.peak_time;
  m.peak_rate = shape.peak_rate;
  m.fwhm = shape.right - shape.left;
  m.multi_lobe = std::any_of(n.begin() + static_cast<std::ptrdiff_t>(shape.right_sample), n.end(),
                             [&](double v) { return v > 0.5 * shape.peak_rate; });
  m.regime = classify_regime(p);
  return m;
}

// ---------------------------------------------------------------------------
// Cavity decay-rate optimization.

enum class Boundary { Interior, Lower, Upper };

inline constexpr std::string_view to_string(Boundary b) noexcept {
  switch (b) {
    case Boundary::Interior: return "interior";
    case Boundary::Lower: return "lower";
    case Boundary::Upper: break;
  }
  return "upper";
}

struct OptimizationReport {
  double kappa_star = 0.0;  ///< rad/ns
  double eta_q_star = 0.0;
  int iterations = 0;
  std::pair<double, double> bracket;  ///< rad/ns
  Boundary boundary = Boundary::Interior;
  bool flat = false;  ///< objective constant over the bracket
};

/// Maximizes eta_q(kappa) over the bracket by golden section in log(kappa), so
/// the tolerance is relative. A maximum sitting on a bracket end is reported
/// as a boundary solution rather than an error.
template <class Objective>
OptimizationReport optimize_kappa_with(Objective&& eta_of_kappa, std::pair<double, double> bracket,
                                       double rel_tol = 1e-6) {
  const auto [lo, hi] = bracket;
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo > 0.0 && hi > lo))
    throw ValidationError("bracket", "need 0 < lo < hi");
  auto objective = [&](double log_kappa) { return eta_of_kappa(std::exp(log_kappa)); };
  const GoldenResult best = golden_section_maximize(objective, std::log(lo), std::log(hi), rel_tol);

  OptimizationReport r;
  r.bracket = bracket;
  r.iterations = best.iterations;
  r.kappa_star = std::exp(best.x);
  r.eta_q_star = best.value;
  const double at_lo = eta_of_kappa(lo);
  const double at_hi = eta_of_kappa(hi);
  r.flat = std::max({at_lo, at_hi, r.eta_q_star}) - std::min({at_lo, at_hi, r.eta_q_star}) <= 1e-15;
  if (!r.flat) {
    if (at_lo >= r.eta_q_star && at_lo >= at_hi) {
      r.boundary = Boundary::Lower;
      r.kappa_star = lo;
      r.eta_q_star = at_lo;
    } else if (at_hi >= r.eta_q_star) {
      r.boundary = Boundary::Upper;
      r.kappa_star = hi;
      r.eta_q_star = at_hi;
    }
  }
  return r;
}

/// Closed-form objective. The stationary point is kappa = g0 for every gamma.
inline OptimizationReport optimize_kappa(double g0, double gamma, std::pair<double, double> bracket,
                                         double rel_tol = 1e-6) {
  validate(SystemParams{g0, 1.0, gamma, 0.0, std::nullopt});
  return optimize_kappa_with(
      [&](double kappa) { return efficiency(SystemParams{g0, kappa, gamma, 0.0, std::nullopt}).eta_q; },
      bracket, rel_tol);
}

/// Optimizes kappa with everything else taken from `base`. Detuned systems
/// go through the integrator since no closed form exists there.
inline OptimizationReport optimize_kappa(const SystemParams& base, std::pair<double, double> bracket,
                                         Route route, double rel_tol = 1e-6) {
  validate(base);
  if (route == Route::Analytic && base.resonant())
    return optimize_kappa(base.g0, base.gamma, bracket, rel_tol);
  return optimize_kappa_with(
      [&](double kappa) {
        SystemParams p = base;
        p.kappa = kappa;
        return efficiency_numeric(p);
      },
      bracket, std::max(rel_tol, 1e-5));
}

// ---------------------------------------------------------------------------
// Parameter sweeps.

enum class Axis { G0, Kappa, Gamma, Delta };

inline constexpr std::string_view to_string(Axis a) noexcept {
  switch (a) {
    case Axis::G0: return "g0";
    case Axis::Kappa: return "kappa";
    case Axis::Gamma: return "gamma";
    case Axis::Delta: break;
  }
  return "delta";
}

inline Axis parse_axis(std::string_view name) {
  if (name == "g0") return Axis::G0;
  if (name == "kappa") return Axis::Kappa;
  if (name == "gamma") return Axis::Gamma;
  if (name == "delta") return Axis::Delta;
  throw ValidationError("axis", "unknown sweep axis '" + std::string(name) +
                                    "' (expected g0, kappa, gamma or delta)");
}

enum class FailureKind { None, Validation, Numeric };

struct SweepPoint {
  double value = 0.0;  ///< rad/ns
  std::optional<EmissionMetrics> metrics;
  FailureKind failure = FailureKind::None;
  std::string error;
};

struct SweepResult {
  Axis axis = Axis::Kappa;
  Route route = Route::Analytic;
  std::vector<SweepPoint> points;

  bool all_ok() const {
    return std::all_of(points.begin(), points.end(),
                       [](const SweepPoint& p) { return p.failure == FailureKind::None; });
  }
};

inline SystemParams with_axis(SystemParams p, Axis axis, double value) {
  switch (axis) {
    case Axis::G0: p.g0 = value; break;
    case Axis::Kappa: p.kappa = value; break;
    case Axis::Gamma: p.gamma = value; break;
    case Axis::Delta: p.delta = value; break;
  }
  return p;
}

inline EmissionMetrics evaluate_point(const SystemParams& p, Route route,
                                      const IntegrationConfig& cfg = {}) {
  if (route == Route::Analytic) return pulse_metrics(p);
  IntegrationConfig run = cfg;
  const double K = p.kappa + p.gamma;
  const double t_max = cfg.t_max.value_or(default_horizon(p));
  if (K * t_max < kMinDecayHorizon) run.t_max = std::max(cfg.tail_extension, kMinDecayHorizon) / K;
  return pulse_metrics(integrate(p, run));
}

/// One metrics record per value, in input order. Points are independent and
/// evaluated on a small worker pool; a failing point is recorded in place.
inline SweepResult sweep(const SystemParams& base, Axis axis, const std::vector<double>& values,
                         Route route, const IntegrationConfig& cfg = {}) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    const bool up = values[1] > values[0];
    if (!(up ? values[i] > values[i - 1] : values[i] < values[i - 1]))
      throw ValidationError("values", "sweep axis must be strictly monotone");
  }
  SweepResult result;
  result.axis = axis;
  result.route = axis == Axis::Delta ? Route::Numeric : route;
  result.points.resize(values.size());

  auto run_point = [&](std::size_t i) {
    SweepPoint& pt = result.points[i];
    pt.value = values[i];
    try {
      pt.metrics = evaluate_point(with_axis(base, axis, values[i]), result.route, cfg);
    } catch (const ValidationError& e) {
      pt.failure = FailureKind::Validation;
      pt.error = e.what();
    } catch (const NumericError& e) {
      pt.failure = FailureKind::Numeric;
      pt.error = e.what();
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(values.size(), std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < values.size(); ++i) run_point(i);
    return result;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < values.size(); i = next++) run_point(i);
    });
  pool.clear();
  return result;
}

inline EfficiencyBreakdown compare_law_kimble(const SystemParams& p) { return efficiency(p); }

}  // namespace cqed
