#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "capacitance.hpp"
#include "profile.hpp"
#include "spectrum.hpp"

// Well geometries by name, plus the parameter sets of the six reference
// quantum-capacitance figures (m* = 0.1 m0 throughout).

namespace qcap::presets {

enum class Geometry { Infinite, Finite, DoubleRect, Parabolic };

inline Geometry parse_geometry(const std::string& s)
{
    if (s == "infinite")
        return Geometry::Infinite;
    if (s == "finite")
        return Geometry::Finite;
    if (s == "double")
        return Geometry::DoubleRect;
    if (s == "parabolic")
        return Geometry::Parabolic;
    throw std::invalid_argument("unknown well '" + s + "' (infinite|finite|double|parabolic)");
}

inline const char* geometry_name(Geometry g)
{
    switch (g) {
    case Geometry::Infinite: return "infinite";
    case Geometry::Finite: return "finite";
    case Geometry::DoubleRect: return "double";
    case Geometry::Parabolic: return "parabolic";
    }
    return "?";
}

struct WellSpec {
    Geometry geometry = Geometry::Finite;
    double width = 5.0;  // nm; single-well width, or each well of a double well
    double depth = 10.0; // eV; parabolic: depth of each parabola
    double gap = 2.0;    // nm, double well barrier
    double x0 = 5.0;     // nm, parabolic half-offset
    double mass_ratio = 0.1;
    std::size_t infinite_levels = 60;
    std::vector<std::string> assumptions;

    std::string label() const
    {
        char buf[128];
        switch (geometry) {
        case Geometry::Infinite: std::snprintf(buf, sizeof buf, "infinite_a%g", width); break;
        case Geometry::Finite: std::snprintf(buf, sizeof buf, "finite_a%g_U%g", width, depth); break;
        case Geometry::DoubleRect:
            std::snprintf(buf, sizeof buf, "double_b%g_gap%g_U%g", width, gap, depth);
            break;
        case Geometry::Parabolic: std::snprintf(buf, sizeof buf, "parabolic_x0_%g_U%g", x0, depth); break;
        }
        return buf;
    }

    Material material() const { return Material(mass_ratio); }

    PotentialProfile profile() const
    {
        switch (geometry) {
        case Geometry::Infinite: return make_infinite_well(width);
        case Geometry::Finite: return make_finite_well(width, depth);
        case Geometry::DoubleRect: return make_double_rect_well(width, gap, depth);
        case Geometry::Parabolic: return make_parabolic_double_well(parabolic_coefficient_for_depth(depth, x0), x0);
        }
        throw std::logic_error("unreachable");
    }
};

/// Spectrum by the default route for the geometry: closed form for the
/// infinite well, the impedance engine otherwise (parabolas discretized into
/// cfg.layers layers per segment).
inline BoundSpectrum solve(const WellSpec& w, const ScanConfig& cfg = {})
{
    const Material m = w.material();
    switch (w.geometry) {
    case Geometry::Infinite: return infinite_well_levels(w.width, m, w.infinite_levels);
    case Geometry::Finite: return finite_well_levels(w.width, w.depth, m, cfg);
    default: return bound_states(w.profile(), m, cfg);
    }
}

struct Figure {
    int number;
    std::vector<WellSpec> wells;
};

inline Figure figure(int number)
{
    auto infinite = [](double a) {
        WellSpec w;
        w.geometry = Geometry::Infinite;
        w.width = a;
        return w;
    };
    auto finite = [](double a) {
        WellSpec w;
        w.geometry = Geometry::Finite;
        w.width = a;
        w.depth = 10.0;
        return w;
    };
    auto dbl = [](double b, double gap, bool depth_assumed) {
        WellSpec w;
        w.geometry = Geometry::DoubleRect;
        w.width = b;
        w.gap = gap;
        w.depth = 10.0;
        if (depth_assumed)
            w.assumptions.push_back("well depth 10 eV not stated for this figure; carried over from figure 4");
        return w;
    };
    auto parabolic = [](double x0) {
        WellSpec w;
        w.geometry = Geometry::Parabolic;
        w.x0 = x0;
        w.depth = 10.0;
        return w;
    };
    switch (number) {
    case 1: return {1, {infinite(5.0), infinite(10.0)}};
    case 2: return {2, {finite(5.0), infinite(5.0)}};
    case 3: return {3, {finite(5.0), finite(2.0)}};
    case 4: return {4, {dbl(5.0, 2.0, false), dbl(5.0, 10.0, false), dbl(10.0, 2.0, false), dbl(10.0, 10.0, false)}};
    case 5: return {5, {dbl(5.0, 2.0, true), dbl(10.0, 2.0, true), dbl(5.0, 10.0, true), dbl(10.0, 10.0, true)}};
    case 6: return {6, {parabolic(10.0), parabolic(5.0), parabolic(2.0)}};
    default: throw std::invalid_argument("figure must be 1..6");
    }
}

} // namespace qcap::presets
