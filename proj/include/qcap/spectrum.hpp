#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "impedance.hpp"
#include "parabolic.hpp"
#include "profile.hpp"

namespace qcap {

enum class Method { AnalyticInfinite, AnalyticFiniteWell, ImpedanceScan, ParabolicDeterminant, Numerov };

inline std::string_view to_string(Method m)
{
    switch (m) {
    case Method::AnalyticInfinite: return "analytic_infinite";
    case Method::AnalyticFiniteWell: return "analytic_finite_well";
    case Method::ImpedanceScan: return "impedance_scan";
    case Method::ParabolicDeterminant: return "parabolic_determinant";
    case Method::Numerov: return "numerov";
    }
    return "unknown";
}

/// Bound levels in the profile's own energy convention, sorted ascending.
/// Levels of a symmetric pair whose splitting is below the solver tolerance
/// may coincide exactly; they remain two entries.
struct BoundSpectrum {
    Method method = Method::ImpedanceScan;
    std::vector<double> energies;  // eV
    std::vector<double> residuals; // |residual| at each reported energy
    std::optional<std::vector<int>> node_counts;
    std::vector<std::string> warnings;

    std::size_t size() const { return energies.size(); }
};

enum class ParitySplit { Auto, Off };

struct ScanConfig {
    std::size_t grid_points = 4000;
    double tol = 1e-9; // eV, final bracket width
    int max_bisections = 200;
    ParitySplit parity_split = ParitySplit::Auto;
    std::size_t layers = 800; // staircase layers per parabolic segment
    std::optional<double> max_energy; // caps the window, e.g. for hard-wall profiles

    void validate() const
    {
        if (grid_points < 100)
            throw std::invalid_argument("grid_points must be at least 100");
        if (!(tol > 0.0))
            throw std::invalid_argument("tol must be positive");
        if (max_bisections < 1)
            throw std::invalid_argument("max_bisections must be positive");
    }
};

namespace scan {

struct Root {
    double energy;
    double residual;
};

/// Scans f on a uniform midpoint grid over (lo, hi), bisects every sign change
/// down to cfg.tol, then takes one secant step inside the final bracket.
/// f must be continuous on the window; roots closer than 10 tol are merged.
template <class F>
std::vector<Root> find_roots(F&& f, double lo, double hi, const ScanConfig& cfg, std::size_t grid_points)
{
    std::vector<Root> roots;
    if (!(hi > lo))
        return roots;
    const double step = (hi - lo) / static_cast<double>(grid_points);
    double e_prev = lo + 0.5 * step;
    double f_prev = f(e_prev);
    if (f_prev == 0.0)
        roots.push_back({e_prev, 0.0});
    for (std::size_t i = 1; i < grid_points; ++i) {
        const double e_cur = lo + (static_cast<double>(i) + 0.5) * step;
        const double f_cur = f(e_cur);
        if (f_cur == 0.0) {
            roots.push_back({e_cur, 0.0});
        } else if (f_prev != 0.0 && std::signbit(f_prev) != std::signbit(f_cur)) {
            double a = e_prev, b = e_cur, fa = f_prev, fb = f_cur;
            for (int it = 0; it < cfg.max_bisections && b - a > cfg.tol; ++it) {
                const double mid = 0.5 * (a + b);
                const double fm = f(mid);
                if (fm == 0.0) {
                    a = b = mid;
                    fa = fb = 0.0;
                    break;
                }
                if (std::signbit(fm) == std::signbit(fa)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                    fb = fm;
                }
            }
            double e = a;
            if (b > a)
                e = std::clamp(a - fa * (b - a) / (fb - fa), a, b);
            roots.push_back({e, std::abs(f(e))});
        }
        e_prev = e_cur;
        f_prev = f_cur;
    }
    std::vector<Root> unique;
    for (const auto& r : roots) {
        if (!unique.empty() && r.energy - unique.back().energy < 10.0 * cfg.tol) {
            if (r.residual < unique.back().residual)
                unique.back() = r;
            continue;
        }
        unique.push_back(r);
    }
    return unique;
}

} // namespace scan

/// Semiclassical level count below `top`: floor(int k dx / pi + 1/2), with
/// hard-wall exteriors contributing nothing. Independent of any solver.
inline std::size_t weyl_estimate(const PotentialProfile& profile, const Material& m, double top)
{
    const double c = m.kinetic_scale();
    auto k_at = [&](double u) { return std::sqrt(std::max(0.0, top - u) / c); };
    double phase = 0.0;
    for (const auto& s : profile.segments()) {
        if (s.is_constant()) {
            phase += k_at(s.level()) * s.width();
            continue;
        }
        constexpr int n = 512; // Simpson panels
        const double h = s.width() / n;
        double acc = k_at(s.at(s.start)) + k_at(s.at(s.end));
        for (int i = 1; i < n; ++i)
            acc += (i % 2 ? 4.0 : 2.0) * k_at(s.at(s.start + i * h));
        phase += acc * h / 3.0;
    }
    return static_cast<std::size_t>(std::floor(phase / std::numbers::pi + 0.5));
}

namespace detail {

inline void sort_spectrum(BoundSpectrum& s)
{
    std::vector<std::size_t> idx(s.energies.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return s.energies[a] < s.energies[b]; });
    BoundSpectrum out = s;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out.energies[i] = s.energies[idx[i]];
        out.residuals[i] = s.residuals[idx[i]];
    }
    s = std::move(out);
}

// Runs `collect(grid)` once, and again at 4x density when the semiclassical
// count exceeds the found count by two or more.
template <class Collect>
BoundSpectrum scan_with_recount(Collect&& collect, Method method, std::size_t expected, const ScanConfig& cfg)
{
    BoundSpectrum s;
    s.method = method;
    collect(cfg.grid_points, s);
    if (expected >= s.size() + 2) {
        BoundSpectrum dense;
        dense.method = method;
        collect(cfg.grid_points * 4, dense);
        if (dense.size() > s.size())
            s = std::move(dense);
        if (expected >= s.size() + 2)
            s.warnings.push_back("semiclassical estimate of " + std::to_string(expected) +
                                 " levels exceeds the " + std::to_string(s.size()) +
                                 " found; roots may be missing");
    }
    sort_spectrum(s);
    return s;
}

} // namespace detail

/// Infinite rectangular well: E_j = (hbar^2 / 2m*) (pi j / a)^2, j = 1..count,
/// measured from the well bottom.
inline BoundSpectrum infinite_well_levels(double a, const Material& m, std::size_t count)
{
    if (!(a > 0.0))
        throw std::invalid_argument("well width must be positive");
    if (count < 1)
        throw std::invalid_argument("count must be at least 1");
    BoundSpectrum s;
    s.method = Method::AnalyticInfinite;
    const double base = m.kinetic_scale() * std::numbers::pi * std::numbers::pi / (a * a);
    for (std::size_t j = 1; j <= count; ++j) {
        s.energies.push_back(base * static_cast<double>(j * j));
        s.residuals.push_back(0.0);
    }
    return s;
}

/// Matching condition of a single rectangular well (exteriors at 0, bottom at
/// -depth) in phase form sin(k a - 2 atan(kappa / k)), equivalent to
/// (k^2 - kappa^2) sin(ka) = 2 k kappa cos(ka). The phase is monotone in E, so
/// every zero is simple and the function has no poles.
inline double finite_well_residual(double energy, double a, double depth, const Material& m)
{
    const double c = m.kinetic_scale();
    const double k = std::sqrt(std::max(0.0, energy + depth) / c);
    const double kappa = std::sqrt(std::max(0.0, -energy) / c);
    return std::sin(k * a - 2.0 * std::atan2(kappa, k));
}

/// Number of bound levels of a finite well: 1 + floor(sqrt(2 m* U) a / (pi hbar)).
inline std::size_t finite_well_count(double a, double depth, const Material& m)
{
    return 1 + static_cast<std::size_t>(
                   std::floor(std::sqrt(depth / m.kinetic_scale()) * a / std::numbers::pi));
}

/// All levels of a finite rectangular well in (-depth, 0), from the
/// single-layer residual above.
inline BoundSpectrum finite_well_levels(double a, double depth, const Material& m, const ScanConfig& cfg = {})
{
    cfg.validate();
    const auto profile = make_finite_well(a, depth);
    auto collect = [&](std::size_t grid, BoundSpectrum& out) {
        auto roots = scan::find_roots([&](double e) { return finite_well_residual(e, a, depth, m); }, -depth,
                                      0.0, cfg, grid);
        for (const auto& r : roots) {
            out.energies.push_back(r.energy);
            out.residuals.push_back(r.residual);
        }
    };
    return detail::scan_with_recount(collect, Method::AnalyticFiniteWell, weyl_estimate(profile, m, 0.0),
                                     cfg);
}

/// Generic engine: impedance matching residual scanned over the bound window.
/// Parabolic segments are replaced by cfg.layers constant layers first.
/// Symmetric profiles are split into even and odd sectors on the right half
/// (unless cfg.parity_split is Off), which keeps exponentially close pairs
/// apart.
inline BoundSpectrum bound_states(const PotentialProfile& profile, const Material& m, const ScanConfig& cfg = {})
{
    cfg.validate();
    const PotentialProfile p = profile.constant_only() ? profile : discretize(profile, cfg.layers);
    const double lo = p.minimum();
    double hi = p.window_top();
    if (cfg.max_energy)
        hi = std::min(hi, *cfg.max_energy);
    if (!(hi > lo))
        throw std::invalid_argument("empty bound-state window");

    const bool split = cfg.parity_split == ParitySplit::Auto && p.is_symmetric();
    const auto half = split ? p.right_half() : std::vector<Segment>{};

    auto collect = [&](std::size_t grid, BoundSpectrum& out) {
        auto push = [&](const std::vector<scan::Root>& roots) {
            for (const auto& r : roots) {
                out.energies.push_back(r.energy);
                out.residuals.push_back(r.residual);
            }
        };
        if (split) {
            for (auto parity : {impedance::Parity::Even, impedance::Parity::Odd}) {
                push(scan::find_roots(
                    [&](double e) {
                        return impedance::parity_residual(half, p.right_exterior(), e, m, parity);
                    },
                    lo, hi, cfg, grid));
            }
        } else {
            auto roots = scan::find_roots(
                [&](double e) { return impedance::matching_residual(p, e, m).continuous; }, lo, hi, cfg, grid);
            for (auto& r : roots) {
                const auto d = impedance::matching_residual(p, r.energy, m);
                r.residual = d.valid ? std::abs(d.value) : r.residual;
            }
            push(roots);
        }
    };
    return detail::scan_with_recount(collect, Method::ImpedanceScan, weyl_estimate(profile, m, hi), cfg);
}

/// Parabolic double well solved on the exact Kummer basis by scanning the
/// matching determinant (parity sectors by default, the full 6x6 system when
/// cfg.parity_split is Off).
inline BoundSpectrum parabolic_double_well_levels(double a, double x0, const Material& m, const ScanConfig& cfg = {})
{
    cfg.validate();
    const auto profile = make_parabolic_double_well(a, x0);
    const double top = a * x0 * x0;
    auto collect = [&](std::size_t grid, BoundSpectrum& out) {
        auto push = [&](const std::vector<scan::Root>& roots) {
            for (const auto& r : roots) {
                out.energies.push_back(r.energy);
                out.residuals.push_back(r.residual);
            }
        };
        if (cfg.parity_split == ParitySplit::Auto) {
            for (auto parity : {impedance::Parity::Even, impedance::Parity::Odd})
                push(scan::find_roots(
                    [&](double e) { return specfun::parabolic_parity_determinant(e, a, x0, m, parity); }, 0.0,
                    top, cfg, grid));
        } else {
            push(scan::find_roots([&](double e) { return specfun::parabolic_matching_determinant(e, a, x0, m); },
                                  0.0, top, cfg, grid));
        }
    };
    return detail::scan_with_recount(collect, Method::ParabolicDeterminant, weyl_estimate(profile, m, top), cfg);
}

} // namespace qcap
