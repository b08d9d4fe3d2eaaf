#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "cqed/error.hpp"
#include "cqed/units.hpp"

namespace cqed {

using complex = std::complex<double>;

/// Physical rates of a single emitter in a one-sided leaky cavity, in rad/ns.
///
/// `kappa` and `gamma` are half-rates: the cavity field amplitude decays as
/// e^{-kappa t} and the emitter population leaks to non-cavity modes at 2 gamma.
/// `delta` is the emitter-cavity detuning omega_0 - omega_c. `gamma0` (half the
/// free-space decay rate) is only needed for Purcell-factor quantities.
struct SystemParams {
  double g0 = 0.0;
  double kappa = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  std::optional<double> gamma0;

  /// Builds from linear frequencies nu = omega / 2pi in GHz.
  static SystemParams from_ghz(double g0_ghz, double kappa_ghz, double gamma_ghz,
                               double delta_ghz = 0.0,
                               std::optional<double> gamma0_ghz = std::nullopt) {
    SystemParams p;
    p.g0 = units::ghz_to_rad_per_ns(g0_ghz);
    p.kappa = units::ghz_to_rad_per_ns(kappa_ghz);
    p.gamma = units::ghz_to_rad_per_ns(gamma_ghz);
    p.delta = units::ghz_to_rad_per_ns(delta_ghz);
    if (gamma0_ghz) p.gamma0 = units::ghz_to_rad_per_ns(*gamma0_ghz);
    return p;
  }

  bool resonant() const noexcept { return delta == 0.0; }

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

inline void validate(const SystemParams& p) {
  auto finite = [](std::string_view name, double v) {
    if (!std::isfinite(v)) throw ValidationError(std::string(name), "must be finite");
  };
  finite("g0", p.g0);
  finite("kappa", p.kappa);
  finite("gamma", p.gamma);
  finite("delta", p.delta);
  if (!(p.g0 > 0.0)) throw ValidationError("g0", "must be > 0");
  if (!(p.kappa > 0.0)) throw ValidationError("kappa", "must be > 0");
  if (!(p.gamma >= 0.0)) throw ValidationError("gamma", "must be >= 0");
  if (p.gamma0) {
    finite("gamma0", *p.gamma0);
    if (!(*p.gamma0 > 0.0)) throw ValidationError("gamma0", "must be > 0");
  }
}

struct DerivedRates {
  double K = 0.0;      ///< kappa + gamma
  double Gamma = 0.0;  ///< kappa - gamma
  /// g^2 = g0^2 - (Gamma/2)^2, kept as a real number so that even-in-g
  /// expressions never have to square a rounded root.
  double g_squared = 0.0;
  /// Principal root of g_squared: real and >= 0, or purely imaginary with
  /// positive imaginary part (overdamped).
  complex g;
  double C0 = 0.0;  ///< g0^2 / (2 kappa gamma); +inf when gamma == 0
  double gamma1 = 0.0;  ///< full atomic linewidth 2 gamma
  std::optional<double> f;     ///< gamma / gamma0
  std::optional<double> Fp;    ///< g0^2 / (kappa gamma0)
  std::optional<double> beta;  ///< Fp / (Fp + f)
};

inline DerivedRates derive_rates(const SystemParams& p) {
  validate(p);
  DerivedRates d;
  d.K = p.kappa + p.gamma;
  d.Gamma = p.kappa - p.gamma;
  const double half = 0.5 * d.Gamma;
  d.g_squared = p.g0 * p.g0 - half * half;
  d.g = std::sqrt(complex(d.g_squared, 0.0));
  d.C0 = p.gamma == 0.0 ? std::numeric_limits<double>::infinity()
                        : p.g0 * p.g0 / (2.0 * p.kappa * p.gamma);
  d.gamma1 = 2.0 * p.gamma;
  if (p.gamma0) {
    d.f = p.gamma / *p.gamma0;
    d.Fp = p.g0 * p.g0 / (p.kappa * *p.gamma0);
    d.beta = *d.Fp / (*d.Fp + *d.f);
  }
  return d;
}

enum class Coupling { Strong, Weak };
enum class CavityRegime { Optimal, Good, Bad, Unclassified };

struct RegimeLabel {
  Coupling coupling = Coupling::Weak;
  CavityRegime cavity = CavityRegime::Unclassified;

  friend bool operator==(const RegimeLabel&, const RegimeLabel&) = default;
};

inline constexpr std::string_view to_string(Coupling c) noexcept {
  return c == Coupling::Strong ? "Strong" : "Weak";
}

inline constexpr std::string_view to_string(CavityRegime r) noexcept {
  switch (r) {
    case CavityRegime::Optimal: return "Optimal";
    case CavityRegime::Good: return "Good";
    case CavityRegime::Bad: return "Bad";
    case CavityRegime::Unclassified: break;
  }
  return "Unclassified";
}

inline std::string to_string(const RegimeLabel& r) {
  return std::string(to_string(r.coupling)) + "/" + std::string(to_string(r.cavity));
}

/// Thresholds turning the qualitative regime labels into a testable rule.
struct RegimeThresholds {
  double much_greater_ratio = 10.0;  ///< a >> b  <=>  a >= ratio * b
  double optimal_rel_tol = 0.05;     ///< |kappa - g0^2/kappa| <= tol * g0
};

/// Coupling is Strong when g0 reaches both loss rates (boundary inclusive, so
/// the kappa == g0 optimum counts as strong). Cavity labels compare kappa with
/// the effective cavity-mediated emitter rate g0^2/kappa; all three labeled
/// cases additionally require gamma to be much smaller than both.
inline RegimeLabel classify_regime(const SystemParams& p, const DerivedRates& /*d*/,
                                   const RegimeThresholds& th = {}) {
  validate(p);
  RegimeLabel label;
  label.coupling = (p.g0 >= p.kappa && p.g0 >= p.gamma) ? Coupling::Strong : Coupling::Weak;

  const double cavity_rate = p.g0 * p.g0 / p.kappa;
  const double smaller = std::min(p.kappa, cavity_rate);
  const bool gamma_negligible = smaller >= th.much_greater_ratio * p.gamma;
  if (!gamma_negligible) return label;

  if (std::abs(p.kappa - cavity_rate) <= th.optimal_rel_tol * p.g0)
    label.cavity = CavityRegime::Optimal;
  else if (cavity_rate > p.kappa)
    label.cavity = CavityRegime::Good;
  else
    label.cavity = CavityRegime::Bad;
  return label;
}

inline RegimeLabel classify_regime(const SystemParams& p) {
  return classify_regime(p, derive_rates(p));
}

}  // namespace cqed
