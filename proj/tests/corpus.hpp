#pragma once

// Seeded random well parameters shared by the property tests and the
// acceptance run.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <qcap/profile.hpp>

namespace qcap::testing {

struct SingleWellCase {
    double a;
    double depth;
    double mass;
};

struct DoubleWellCase {
    double b;
    double gap;
    double depth;
    double mass;
};

// Fractional part of sqrt(U / c) a / pi. A value just above an integer means
// a level sits just under the well top, where its decay length outgrows any
// finite oracle box; such draws are skipped.
inline double threshold_fraction(double width, double depth, double mass)
{
    const double c = Material(mass).kinetic_scale();
    const double p = std::sqrt(depth / c) * width / std::numbers::pi;
    return p - std::floor(p);
}

inline std::vector<SingleWellCase> single_well_corpus(std::size_t n, std::uint64_t seed = 20261014)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> width(0.5, 12.0);
    std::uniform_real_distribution<double> lg_depth(std::log10(0.05), std::log10(12.0));
    std::uniform_real_distribution<double> lg_mass(std::log10(0.03), std::log10(0.6));
    std::vector<SingleWellCase> out;
    while (out.size() < n) {
        SingleWellCase c{width(rng), std::pow(10.0, lg_depth(rng)), std::pow(10.0, lg_mass(rng))};
        if (threshold_fraction(c.a, c.depth, c.mass) < 0.03)
            continue;
        out.push_back(c);
    }
    return out;
}

// New double-well levels appear at E = 0 when, with k0 = sqrt(U / c), the
// phase k0 b reaches n pi (even states: flat in the barrier) or
// n pi + atan(2 / (gap k0)) (odd states: linear in the barrier). Returns how
// far past the nearest such phase the well sits, in units of pi.
inline double double_well_threshold_distance(const DoubleWellCase& w)
{
    const double c = Material(w.mass).kinetic_scale();
    const double k0 = std::sqrt(w.depth / c);
    const double phase = k0 * w.b / std::numbers::pi;
    const double even = phase - std::floor(phase);
    const double shifted = phase - std::atan(2.0 / (w.gap * k0)) / std::numbers::pi;
    const double odd = shifted - std::floor(shifted);
    return std::min(even, odd);
}

inline std::vector<DoubleWellCase> double_well_corpus(std::size_t n, std::uint64_t seed = 777001)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> width(0.5, 7.0);
    std::uniform_real_distribution<double> gap(0.1, 8.0);
    std::uniform_real_distribution<double> lg_depth(std::log10(0.1), std::log10(12.0));
    std::uniform_real_distribution<double> lg_mass(std::log10(0.04), std::log10(0.4));
    std::vector<DoubleWellCase> out;
    while (out.size() < n) {
        DoubleWellCase c{width(rng), gap(rng), std::pow(10.0, lg_depth(rng)), std::pow(10.0, lg_mass(rng))};
        if (double_well_threshold_distance(c) < 0.03)
            continue;
        out.push_back(c);
    }
    return out;
}

} // namespace qcap::testing
