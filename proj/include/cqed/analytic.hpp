#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "cqed/core_model.hpp"

// Closed-form resonant (delta == 0) single-excitation dynamics and the
// efficiency formulas built on them.
namespace cqed {

struct AmplitudePair {
  complex E;  ///< emitter excited, cavity empty
  complex C;  ///< emitter ground, one cavity photon
};

struct EfficiencyBreakdown {
  double eta_q = 0.0;     ///< quantum efficiency, eta_c * eta_extr
  double eta_c = 0.0;     ///< coupling efficiency g0^2 / (g0^2 + kappa gamma)
  double eta_extr = 0.0;  ///< extraction efficiency kappa / (kappa + gamma)
  double law_kimble = 0.0;        ///< bad-cavity estimate 2 C0 / (2 C0 + 1)
  double law_kimble_error = 0.0;  ///< law_kimble - eta_q = eta_c gamma / (kappa + gamma)
};

/// Photon spectral density on a detuning axis (rad/ns). `density` is
/// normalized so that its integral over delta is the emitted probability.
struct SpectrumGrid {
  std::vector<double> delta;
  std::vector<double> density;
};

namespace detail {

/// e^{-Kt/2} cos(g t) and e^{-Kt/2} sin(g t)/g for g^2 of either sign.
///
/// Both are even in g, so only g^2 enters. Small |g t| uses a Taylor series to
/// stay smooth through critical damping; the overdamped branch is written as
/// a difference of decaying exponentials so it cannot overflow.
struct DampedKernel {
  double cos_part = 0.0;
  double sinc_part = 0.0;
};

inline DampedKernel damped_kernel(double g_squared, double K, double t) noexcept {
  const double x = g_squared * t * t;
  if (std::abs(x) < 1e-8) {
    const double env = std::exp(-0.5 * K * t);
    return {env * (1.0 - x / 2.0 + x * x / 24.0 - x * x * x / 720.0),
            env * t * (1.0 - x / 6.0 + x * x / 120.0)};
  }
  if (g_squared > 0.0) {
    const double env = std::exp(-0.5 * K * t);
    const double w = std::sqrt(g_squared);
    return {env * std::cos(w * t), env * std::sin(w * t) / w};
  }
  const double a = std::sqrt(-g_squared);
  if (a * t < 1.0) {
    const double env = std::exp(-0.5 * K * t);
    return {env * std::cosh(a * t), env * std::sinh(a * t) / a};
  }
  const double slow = std::exp((a - 0.5 * K) * t);
  const double fast = std::exp(-(a + 0.5 * K) * t);
  return {0.5 * (slow + fast), 0.5 * (slow - fast) / a};
}

inline void require_resonant(const SystemParams& p) {
  if (!p.resonant())
    throw ValidationError("delta", "resonance-only closed form requires delta == 0; "
                                   "use the numeric integrator for detuned systems");
}

inline void require_time(double t) {
  if (!std::isfinite(t) || t < 0.0) throw ValidationError("t", "must be finite and >= 0");
}

// 8-point Gauss-Legendre on [-1, 1].
inline constexpr std::array<double, 4> gl8_nodes{0.1834346424956498, 0.5255324099163290,
                                                 0.7966664774136267, 0.9602898564975363};
inline constexpr std::array<double, 4> gl8_weights{0.3626837833783620, 0.3137066458778873,
                                                   0.2223810344533745, 0.1012285362903763};

inline double rate_from_kernel(const SystemParams& p, const DampedKernel& k) noexcept {
  return 2.0 * p.kappa * p.g0 * p.g0 * k.sinc_part * k.sinc_part;
}

}  // namespace detail

inline AmplitudePair amplitudes_at(const SystemParams& p, double t) {
  detail::require_resonant(p);
  detail::require_time(t);
  const DerivedRates d = derive_rates(p);
  const auto k = detail::damped_kernel(d.g_squared, d.K, t);
  return {complex(k.cos_part + 0.5 * d.Gamma * k.sinc_part, 0.0),
          complex(0.0, -p.g0 * k.sinc_part)};
}

/// Photon emission rate n(t) = 2 kappa |C(t)|^2 out of the cavity, in 1/ns.
inline double emission_rate_at(const SystemParams& p, double t) {
  detail::require_resonant(p);
  detail::require_time(t);
  const DerivedRates d = derive_rates(p);
  return detail::rate_from_kernel(p, detail::damped_kernel(d.g_squared, d.K, t));
}

inline EfficiencyBreakdown efficiency(const SystemParams& p) {
  const DerivedRates d = derive_rates(p);
  EfficiencyBreakdown b;
  const double g0_sq = p.g0 * p.g0;
  b.eta_c = g0_sq / (g0_sq + p.kappa * p.gamma);
  b.eta_extr = p.kappa / (p.kappa + p.gamma);
  b.eta_q = b.eta_c * b.eta_extr;
  b.law_kimble = std::isinf(d.C0) ? 1.0 : 2.0 * d.C0 / (2.0 * d.C0 + 1.0);
  b.law_kimble_error = b.eta_c * p.gamma / (p.kappa + p.gamma);
  return b;
}

/// Probability P_o(t) that the photon has left through the output mirror by t.
///
/// Early times, where the closed form is a difference of nearly equal terms,
/// integrate the rate directly with Gauss-Legendre instead.
inline double emission_probability_at(const SystemParams& p, double t) {
  detail::require_resonant(p);
  detail::require_time(t);
  const DerivedRates d = derive_rates(p);
  const double g_abs = std::sqrt(std::abs(d.g_squared));
  if ((d.K + g_abs) * t < 0.5) {
    const double half = 0.5 * t;
    double sum = 0.0;
    for (std::size_t i = 0; i < detail::gl8_nodes.size(); ++i) {
      for (double s : {-1.0, 1.0}) {
        const double ti = half * (1.0 + s * detail::gl8_nodes[i]);
        sum += detail::gl8_weights[i] *
               detail::rate_from_kernel(p, detail::damped_kernel(d.g_squared, d.K, ti));
      }
    }
    return half * sum;
  }
  const auto k = detail::damped_kernel(d.g_squared, d.K, t);
  const double bracket = std::exp(-d.K * t) + 0.5 * d.K * d.K * k.sinc_part * k.sinc_part +
                         d.K * k.sinc_part * k.cos_part;
  return efficiency(p).eta_q * (1.0 - bracket);
}

/// Quantum efficiency written with the Purcell factor and the beta factor.
inline double efficiency_via_purcell(const SystemParams& p) {
  if (!p.gamma0) throw ValidationError("gamma0", "Purcell form requires gamma0");
  const DerivedRates d = derive_rates(p);
  return *d.beta * p.kappa / (p.kappa + p.gamma);
}

inline void validate_detuning_grid(std::span<const double> grid) {
  if (grid.empty()) throw ValidationError("grid", "detuning grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw ValidationError("grid", "non-finite detuning");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw ValidationError("grid", "detuning grid must be strictly increasing");
  }
}

/// `n` evenly spaced detunings covering [lo, hi].
inline std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  if (n < 2) throw ValidationError("points", "need at least two grid points");
  if (!(hi > lo)) throw ValidationError("grid", "upper bound must exceed lower bound");
  std::vector<double> grid(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) grid[i] = lo + step * static_cast<double>(i);
  grid.back() = hi;
  return grid;
}

/// Trapezoid integral of the density over its own axis.
inline double integrate(const SpectrumGrid& s) {
  double total = 0.0;
  for (std::size_t i = 1; i < s.delta.size(); ++i)
    total += 0.5 * (s.delta[i] - s.delta[i - 1]) * (s.density[i] + s.density[i - 1]);
  return total;
}

/// S(delta) = (kappa/pi) |integral_0^inf e^{i delta t} C(t) dt|^2, which for the
/// resonant closed form is (kappa/pi) g0^2 / |(K/2 - i delta)^2 + g^2|^2.
inline SpectrumGrid output_spectrum_analytic(const SystemParams& p, std::span<const double> grid) {
  detail::require_resonant(p);
  validate_detuning_grid(grid);
  const DerivedRates d = derive_rates(p);
  const double scale = p.kappa / std::numbers::pi * p.g0 * p.g0;
  const double a = 0.25 * d.K * d.K + d.g_squared;
  SpectrumGrid s;
  s.delta.assign(grid.begin(), grid.end());
  s.density.reserve(grid.size());
  for (double delta : grid) {
    const double u = delta * delta;
    const double re = a - u;
    s.density.push_back(scale / (re * re + d.K * d.K * u));
  }
  return s;
}

}  // namespace cqed
