#pragma once

#include <numbers>

// Internal rates are angular frequencies in rad/ns. Everything crossing the
// process boundary is a linear frequency nu = omega / 2pi in GHz.
namespace cqed::units {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double ghz_to_rad_per_ns(double nu_ghz) noexcept { return two_pi * nu_ghz; }
constexpr double rad_per_ns_to_ghz(double omega) noexcept { return omega / two_pi; }

constexpr double ns_to_ps(double t_ns) noexcept { return 1e3 * t_ns; }

}  // namespace cqed::units
