#pragma once

#include <cmath>
#include <numbers>

/// Unit conventions used throughout qcap: energies in eV, lengths in nm,
/// masses as ratios of the bare electron mass m0.
namespace qcap::constants {

// CODATA 2018
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double electron_mass = 9.1093837015e-31; // kg
inline constexpr double elementary_charge = 1.602176634e-19; // C

/// hbar^2 / (2 m0) in eV nm^2 (0.0380998).
inline constexpr double hbar2_over_2m0 =
    hbar * hbar / (2.0 * electron_mass) / elementary_charge * 1e18;

/// e^2 m0 / (pi hbar^2) in F/m^2: the capacitance quantum of one 2D subband
/// for unit mass ratio.
inline constexpr double cq_unit =
    elementary_charge * elementary_charge * electron_mass / (std::numbers::pi * hbar * hbar);

/// m0 / (pi hbar^2) expressed per eV: n [1/m^2] = m* * density_unit * dE [eV].
inline constexpr double density_unit =
    electron_mass * elementary_charge / (std::numbers::pi * hbar * hbar);

/// hbar / sqrt(m0) in sqrt(eV) nm; converts a log-derivative (1/nm) into the
/// quantum wave impedance measured in sqrt(eV / m0) units.
inline const double hbar_over_sqrt_m0 = std::sqrt(2.0 * hbar2_over_2m0);

inline constexpr double per_m2_to_per_cm2 = 1e-4;

} // namespace qcap::constants
