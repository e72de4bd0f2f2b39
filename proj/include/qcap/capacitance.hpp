#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "constants.hpp"
#include "profile.hpp"
#include "spectrum.hpp"

// Zero-temperature 2DEG: each bound level E_j carries a 2D subband with the
// constant density of states m* / (pi hbar^2) (spin included), so
//   n(mu)   = sum_j m* (mu - E_j) / (pi hbar^2) theta(mu - E_j)
//   C_q(mu) = e^2 m* / (pi hbar^2) * #{j : E_j <= mu}
// A level exactly at mu counts as occupied (theta(0) = 1).

namespace qcap::capacitance {

/// e^2 m* / (pi hbar^2) in F/m^2.
inline double quantum_unit(const Material& m) { return m.effective_mass_ratio() * constants::cq_unit; }

/// Subband density of states m* / (pi hbar^2) in 1/(m^2 eV).
inline double subband_dos(const Material& m) { return m.effective_mass_ratio() * constants::density_unit; }

inline double f_per_m2_to_uf_per_cm2(double c) { return c * 100.0; }

/// Sheet density in 1/m^2 at chemical potential mu (eV).
inline double concentration(double mu, const BoundSpectrum& spectrum, const Material& m)
{
    double excess = 0.0;
    for (double e : spectrum.energies)
        if (mu >= e)
            excess += mu - e;
    return subband_dos(m) * excess;
}

inline std::size_t occupied_subbands(double mu, const BoundSpectrum& spectrum)
{
    return static_cast<std::size_t>(
        std::count_if(spectrum.energies.begin(), spectrum.energies.end(), [&](double e) { return e <= mu; }));
}

/// C_q in F/m^2 at chemical potential mu.
inline double capacitance_at_mu(double mu, const BoundSpectrum& spectrum, const Material& m)
{
    return quantum_unit(m) * static_cast<double>(occupied_subbands(mu, spectrum));
}

struct CurveSample {
    double lg_n;          // log10(n / cm^-2)
    double cq;            // F/m^2
    std::size_t occupied; // subbands below mu(n)
};

struct CapacitanceCurve {
    /// Density (1/cm^2) at which subband j starts to fill; the first entry is 0.
    /// Non-decreasing: levels that coincide numerically give equal entries.
    std::vector<double> step_densities;
    /// C_q (F/m^2) once subband j is occupied: (j+1) quantum units.
    std::vector<double> step_heights;
    std::vector<CurveSample> samples;
};

/// Closed-form step positions n_j = (m*/pi hbar^2) sum_{i<j} (E_j - E_i), 1/cm^2.
inline std::vector<double> step_densities(const BoundSpectrum& spectrum, const Material& m)
{
    std::vector<double> e = spectrum.energies;
    std::sort(e.begin(), e.end());
    std::vector<double> out;
    out.reserve(e.size());
    double prefix = 0.0;
    for (std::size_t j = 0; j < e.size(); ++j) {
        out.push_back(j == 0 ? 0.0
                             : subband_dos(m) * (static_cast<double>(j) * e[j] - prefix) * constants::per_m2_to_per_cm2);
        prefix += e[j];
    }
    return out;
}

/// Subbands occupied at sheet density n (1/cm^2), using the closed-form step
/// positions. Zero only for an empty spectrum.
inline std::size_t occupied_at_density(double n_cm2, std::span<const double> steps)
{
    return static_cast<std::size_t>(std::upper_bound(steps.begin(), steps.end(), n_cm2) - steps.begin());
}

/// Inverse of concentration(): mu(n) = (n pi hbar^2 / m* + sum_{i<=j} E_i) / j
/// with j the number of occupied subbands. n in 1/m^2.
inline double chemical_potential(double n_m2, const BoundSpectrum& spectrum, const Material& m)
{
    if (spectrum.energies.empty())
        throw std::invalid_argument("chemical_potential: empty spectrum");
    if (n_m2 < 0.0)
        throw std::invalid_argument("chemical_potential: negative density");
    std::vector<double> e = spectrum.energies;
    std::sort(e.begin(), e.end());
    const auto steps = step_densities(spectrum, m);
    const std::size_t j = std::max<std::size_t>(1, occupied_at_density(n_m2 * constants::per_m2_to_per_cm2, steps));
    double sum = 0.0;
    for (std::size_t i = 0; i < j; ++i)
        sum += e[i];
    return (n_m2 / subband_dos(m) + sum) / static_cast<double>(j);
}

/// Staircase C_q(n) on a grid of densities (1/cm^2, positive and sorted).
/// Beyond the last step the curve stays flat at the full subband count.
inline CapacitanceCurve capacitance_vs_density(const BoundSpectrum& spectrum, const Material& m,
                                               std::span<const double> n_grid_cm2)
{
    if (spectrum.energies.empty())
        throw std::invalid_argument("capacitance_vs_density: empty spectrum");
    for (std::size_t i = 0; i < n_grid_cm2.size(); ++i) {
        if (!(n_grid_cm2[i] > 0.0))
            throw std::invalid_argument("density grid must be positive");
        if (i > 0 && n_grid_cm2[i] < n_grid_cm2[i - 1])
            throw std::invalid_argument("density grid must be sorted");
    }
    CapacitanceCurve curve;
    curve.step_densities = step_densities(spectrum, m);
    const double unit = quantum_unit(m);
    for (std::size_t j = 0; j < curve.step_densities.size(); ++j)
        curve.step_heights.push_back(unit * static_cast<double>(j + 1));
    curve.samples.reserve(n_grid_cm2.size());
    for (double n : n_grid_cm2) {
        const std::size_t occ = occupied_at_density(n, curve.step_densities);
        curve.samples.push_back({std::log10(n), unit * static_cast<double>(occ), occ});
    }
    return curve;
}

/// n_points densities uniformly spaced in log10(n / cm^-2) over [lg_min, lg_max].
inline std::vector<double> log_density_grid(double lg_min = 10.0, double lg_max = 15.0, std::size_t n_points = 500)
{
    if (n_points < 2 || !(lg_max > lg_min))
        throw std::invalid_argument("log_density_grid: need lg_max > lg_min and at least two points");
    std::vector<double> out(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double lg = lg_min + (lg_max - lg_min) * static_cast<double>(i) / static_cast<double>(n_points - 1);
        out[i] = std::pow(10.0, lg);
    }
    return out;
}

} // namespace qcap::capacitance
