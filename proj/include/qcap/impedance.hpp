#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <stdexcept>

#include "constants.hpp"
#include "profile.hpp"

// Quantum wave impedance z = -(i hbar / m) psi'/psi, carried here as the real
// log-derivative L = psi'/psi. Inside the bound-state window every exterior is
// evanescent and all layer transfers stay real.

namespace qcap::impedance {

enum class Regime { Propagating, Evanescent };

struct LayerKinematics {
    Regime regime;
    double wavenumber;                         // k or kappa, 1/nm
    double characteristic_impedance_magnitude; // sqrt(2|E-U|/m*), sqrt(eV/m0) units
};

/// E == U is classed as Evanescent with kappa = 0.
inline LayerKinematics layer_kinematics(double energy, double level, const Material& m)
{
    const double diff = energy - level;
    const double k = std::sqrt(std::abs(diff) / m.kinetic_scale());
    return {diff > 0.0 ? Regime::Propagating : Regime::Evanescent, k,
            std::sqrt(2.0 * std::abs(diff) / m.effective_mass_ratio())};
}

/// z = -i (hbar/m*) L in sqrt(eV/m0) units; L in 1/nm.
inline std::complex<double> impedance_from_logderiv(double logderiv, const Material& m)
{
    return {0.0, -constants::hbar_over_sqrt_m0 * logderiv / m.effective_mass_ratio()};
}

/// Inverse of impedance_from_logderiv; the real part of z must vanish.
inline double logderiv_from_impedance(std::complex<double> z, const Material& m)
{
    return -z.imag() * m.effective_mass_ratio() / constants::hbar_over_sqrt_m0;
}

/// Wavefunction value and slope at a point, up to a positive scale.
struct WaveState {
    double value;
    double slope;
};

namespace detail {

// tanh(z)/z and sin(z)/z, accurate near z = 0
inline double tanhc(double z) { return std::abs(z) < 1e-4 ? 1.0 - z * z / 3.0 : std::tanh(z) / z; }
inline double sinc(double z) { return std::abs(z) < 1e-4 ? 1.0 - z * z / 6.0 : std::sin(z) / z; }

inline WaveState rescale(WaveState s)
{
    const double n = std::abs(s.value) + std::abs(s.slope);
    return n > 0.0 ? WaveState{s.value / n, s.slope / n} : s;
}

} // namespace detail

/// Carries (psi, psi') from the right edge of a constant layer of thickness d
/// to its left edge. The evanescent transfer is divided by cosh(kappa d) so it
/// saturates instead of overflowing; the result is rescaled by a positive
/// factor, which leaves both log-derivative and node structure unchanged.
inline WaveState propagate_state(WaveState out, double energy, double level, double d, const Material& m)
{
    if (!(d > 0.0))
        throw std::invalid_argument("layer thickness must be positive");
    const auto kin = layer_kinematics(energy, level, m);
    const double k = kin.wavenumber;
    if (kin.regime == Regime::Evanescent) {
        const double s = d * detail::tanhc(k * d); // tanh(kd)/k, == d when k == 0
        return detail::rescale({out.value - s * out.slope, out.slope - k * k * s * out.value});
    }
    const double c = std::cos(k * d);
    const double s = d * detail::sinc(k * d); // sin(kd)/k
    return detail::rescale({c * out.value - s * out.slope, k * k * s * out.value + c * out.slope});
}

/// Log-derivative at the input (left) face of a layer given the load
/// log-derivative at its output face. Returns +-infinity at a pole (psi = 0
/// at the input). For kappa == 0 this reduces to L / (1 - L d).
inline double propagate_through_layer(double load_logderiv, double energy, double level, double d,
                                      const Material& m)
{
    WaveState out = std::isinf(load_logderiv) ? WaveState{0.0, std::copysign(1.0, load_logderiv)}
                                              : WaveState{1.0, load_logderiv};
    const WaveState in = propagate_state(out, energy, level, d, m);
    if (in.value == 0.0)
        return std::copysign(std::numeric_limits<double>::infinity(), in.slope);
    return in.slope / in.value;
}

/// State just inside the right exterior for a solution decaying to +inf.
inline WaveState right_exterior_state(double energy, double exterior, const Material& m)
{
    if (is_hard_wall(exterior))
        return {0.0, -1.0};
    const double kappa = layer_kinematics(energy, exterior, m).wavenumber;
    return detail::rescale({1.0, -kappa});
}

/// Sweeps a state leftward through a run of constant segments.
inline WaveState sweep_left(WaveState state, std::span<const Segment> segments, double energy,
                            const Material& m)
{
    for (auto it = segments.rbegin(); it != segments.rend(); ++it) {
        if (!it->is_constant())
            throw std::invalid_argument("impedance sweep requires constant segments (discretize first)");
        state = propagate_state(state, energy, it->level(), it->width(), m);
    }
    return state;
}

struct MatchingResidual {
    double energy;
    /// (L - kappa_L) / (|L| + kappa_L), in [-1, 1]; jumps sign where psi = 0.
    double value;
    /// false where value sits on a pole (psi = 0 at the left face).
    bool valid;
    /// Pole-free form (psi' - kappa_L psi) / (|psi'| + kappa_L |psi|): continuous
    /// in energy with the same zeros as value, so sign changes bracket only roots.
    double continuous;
};

enum class Sweep { RightToLeft, LeftToRight };

/// Matching mismatch at the left face for a solution started decaying from
/// the right exterior. Hard-wall exteriors impose psi = 0.
inline MatchingResidual matching_residual(const PotentialProfile& profile, double energy,
                                          const Material& m, Sweep sweep = Sweep::RightToLeft)
{
    if (sweep == Sweep::LeftToRight)
        return matching_residual(profile.mirrored(), energy, m, Sweep::RightToLeft);
    if (!profile.constant_only())
        throw std::invalid_argument("matching_residual requires a constant-segment profile");
    if (!(energy > profile.minimum() && energy < profile.window_top()))
        throw std::domain_error("energy outside the bound-state window");

    const WaveState s =
        sweep_left(right_exterior_state(energy, profile.right_exterior(), m), profile.segments(), energy, m);

    MatchingResidual r{energy, 0.0, true, 0.0};
    if (is_hard_wall(profile.left_exterior())) {
        // kappa_L -> inf limit: only psi itself matters
        r.continuous = -s.value / (std::abs(s.value) + std::abs(s.slope));
        r.value = r.continuous;
        return r;
    }
    const double kappa = layer_kinematics(energy, profile.left_exterior(), m).wavenumber;
    const double norm = std::abs(s.slope) + kappa * std::abs(s.value);
    r.continuous = (s.slope - kappa * s.value) / norm;
    if (std::abs(s.value) <= 1e-300) {
        r.valid = false;
        r.value = std::copysign(1.0, s.slope);
        return r;
    }
    const double logderiv = s.slope / s.value;
    r.value = (logderiv - kappa) / (std::abs(logderiv) + kappa);
    r.valid = std::isfinite(r.value);
    return r;
}

enum class Parity { Even, Odd };

/// Symmetric-profile residual on the right half: psi'(center) for even states,
/// psi(center) for odd ones, each normalized to [-1, 1] and continuous in E.
inline double parity_residual(std::span<const Segment> right_half, double right_exterior, double energy,
                              const Material& m, Parity parity)
{
    const WaveState s = sweep_left(right_exterior_state(energy, right_exterior, m), right_half, energy, m);
    const double norm = std::abs(s.value) + std::abs(s.slope);
    return parity == Parity::Even ? s.slope / norm : s.value / norm;
}

} // namespace qcap::impedance
