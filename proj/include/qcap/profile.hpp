#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "constants.hpp"

namespace qcap {

/// Exterior level standing in for an infinite wall. Exteriors at or above this
/// level are treated as hard (Dirichlet) walls by the solvers.
inline constexpr double kHardWall = 1e6;

inline bool is_hard_wall(double level) { return level >= kHardWall; }

class Material {
public:
    explicit Material(double effective_mass_ratio = 0.1) : mass_ratio_(effective_mass_ratio)
    {
        if (!(effective_mass_ratio > 0.0) || !std::isfinite(effective_mass_ratio))
            throw std::invalid_argument("effective mass ratio must be positive");
    }

    double effective_mass_ratio() const { return mass_ratio_; }

    /// hbar^2 / (2 m*) in eV nm^2.
    double kinetic_scale() const { return constants::hbar2_over_2m0 / mass_ratio_; }

    friend bool operator==(const Material&, const Material&) = default;

private:
    double mass_ratio_;
};

struct Constant {
    double level; // eV
    friend bool operator==(const Constant&, const Constant&) = default;
};

/// U(x) = coefficient * (x - center)^2
struct Parabola {
    double coefficient; // eV / nm^2
    double center;      // nm
    friend bool operator==(const Parabola&, const Parabola&) = default;
};

using SegmentShape = std::variant<Constant, Parabola>;

struct Segment {
    SegmentShape shape;
    double start; // nm
    double end;   // nm

    Segment(SegmentShape s, double x_start, double x_end) : shape(s), start(x_start), end(x_end)
    {
        if (!(start < end))
            throw std::invalid_argument("segment start must be below its end");
        if (const auto* p = std::get_if<Parabola>(&shape); p && !(p->coefficient > 0.0))
            throw std::invalid_argument("parabola coefficient must be positive");
    }

    double width() const { return end - start; }
    bool is_constant() const { return std::holds_alternative<Constant>(shape); }

    /// Level of a Constant segment; throws for parabolas.
    double level() const { return std::get<Constant>(shape).level; }

    double at(double x) const
    {
        if (const auto* c = std::get_if<Constant>(&shape))
            return c->level;
        const auto& p = std::get<Parabola>(shape);
        const double y = x - p.center;
        return p.coefficient * y * y;
    }

    double min_value() const
    {
        if (const auto* c = std::get_if<Constant>(&shape))
            return c->level;
        const auto& p = std::get<Parabola>(shape);
        const double xc = std::clamp(p.center, start, end);
        return at(xc);
    }

    double max_value() const
    {
        if (is_constant())
            return level();
        return std::max(at(start), at(end));
    }

    friend bool operator==(const Segment&, const Segment&) = default;
};

/// A 1D potential: constant exteriors on (-inf, x_begin) and [x_end, inf)
/// joined by contiguous segments.
class PotentialProfile {
public:
    PotentialProfile(double left_exterior, std::vector<Segment> segments, double right_exterior)
        : left_(left_exterior), right_(right_exterior)
    {
        if (segments.empty())
            throw std::invalid_argument("profile needs at least one segment");
        if (!std::isfinite(left_) || !std::isfinite(right_))
            throw std::invalid_argument("exterior levels must be finite");
        for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
            if (segments[i].end != segments[i + 1].start)
                throw std::invalid_argument("segments must be contiguous (segment " +
                                            std::to_string(i) + " end != segment " +
                                            std::to_string(i + 1) + " start)");
        }
        segments_ = std::move(segments);
        if (!(minimum() < window_top()))
            throw std::invalid_argument(
                "profile minimum must lie below both exterior levels (no bound states otherwise)");
    }

    double left_exterior() const { return left_; }
    double right_exterior() const { return right_; }
    std::span<const Segment> segments() const { return segments_; }

    double x_begin() const { return segments_.front().start; }
    double x_end() const { return segments_.back().end; }
    double center() const { return 0.5 * (x_begin() + x_end()); }

    /// Upper edge of the bound-state window.
    double window_top() const { return std::min(left_, right_); }

    double minimum() const
    {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& s : segments_)
            m = std::min(m, s.min_value());
        return m;
    }

    bool constant_only() const
    {
        return std::all_of(segments_.begin(), segments_.end(),
                           [](const Segment& s) { return s.is_constant(); });
    }

    /// U(x); segments are half-open [start, end).
    double operator()(double x) const
    {
        if (x < x_begin())
            return left_;
        if (x >= x_end())
            return right_;
        auto it = std::upper_bound(segments_.begin(), segments_.end(), x,
                                   [](double v, const Segment& s) { return v < s.start; });
        return std::prev(it)->at(x);
    }

    /// Reflection x -> 2*center - x.
    PotentialProfile mirrored() const
    {
        const double pivot = x_begin() + x_end();
        std::vector<Segment> out;
        out.reserve(segments_.size());
        for (auto it = segments_.rbegin(); it != segments_.rend(); ++it) {
            SegmentShape shape = it->shape;
            if (auto* p = std::get_if<Parabola>(&shape))
                p->center = pivot - p->center;
            out.emplace_back(shape, pivot - it->end, pivot - it->start);
        }
        // keep the boundaries bit-identical after reflection
        for (std::size_t i = 0; i + 1 < out.size(); ++i)
            out[i + 1].start = out[i].end;
        return PotentialProfile(right_, std::move(out), left_);
    }

    /// Mirror symmetry about center(), with a relative tolerance on levels
    /// and positions.
    bool is_symmetric(double rel_tol = 1e-12) const
    {
        const double level_scale = std::max({std::abs(left_), std::abs(right_), 1.0});
        const double length_scale = std::max({std::abs(x_begin()), std::abs(x_end()), 1.0});
        auto close = [&](double a, double b, double scale) {
            return std::abs(a - b) <= rel_tol * scale;
        };
        if (!close(left_, right_, level_scale))
            return false;
        const double c = center();
        const std::size_t n = segments_.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Segment& a = segments_[i];
            const Segment& b = segments_[n - 1 - i];
            if (!close(a.start - c, c - b.end, length_scale) || !close(a.end - c, c - b.start, length_scale))
                return false;
            if (a.is_constant() != b.is_constant())
                return false;
            if (a.is_constant()) {
                if (!close(a.level(), b.level(), level_scale))
                    return false;
            } else {
                const auto& pa = std::get<Parabola>(a.shape);
                const auto& pb = std::get<Parabola>(b.shape);
                if (!close(pa.coefficient, pb.coefficient, std::abs(pa.coefficient)) ||
                    !close(pa.center - c, c - pb.center, length_scale))
                    return false;
            }
        }
        return true;
    }

    /// Segments of [center(), x_end()), the first one clipped at the center.
    std::vector<Segment> right_half() const
    {
        const double c = center();
        std::vector<Segment> out;
        for (const auto& s : segments_) {
            if (s.end <= c)
                continue;
            Segment part = s;
            part.start = std::max(s.start, c);
            out.push_back(part);
        }
        return out;
    }

    /// Copy with adjacent Constant segments at the same level fused.
    PotentialProfile merged() const
    {
        std::vector<Segment> out;
        for (const auto& s : segments_) {
            if (!out.empty() && s.is_constant() && out.back().is_constant() &&
                out.back().level() == s.level()) {
                out.back().end = s.end;
                continue;
            }
            out.push_back(s);
        }
        return PotentialProfile(left_, std::move(out), right_);
    }

    friend bool operator==(const PotentialProfile&, const PotentialProfile&) = default;

private:
    double left_;
    std::vector<Segment> segments_;
    double right_;
};

/// Rectangular well of width `a` with infinite walls (sentinel exteriors).
inline PotentialProfile make_infinite_well(double a)
{
    if (!(a > 0.0))
        throw std::invalid_argument("well width must be positive");
    return PotentialProfile(kHardWall, {Segment(Constant{0.0}, 0.0, a)}, kHardWall);
}

/// Finite rectangular well: exteriors at 0, bottom at -depth.
inline PotentialProfile make_finite_well(double a, double depth)
{
    if (!(a > 0.0))
        throw std::invalid_argument("well width must be positive");
    if (!(depth > 0.0))
        throw std::invalid_argument("well depth must be positive");
    return PotentialProfile(0.0, {Segment(Constant{-depth}, 0.0, a)}, 0.0);
}

/// Two wells of width b and depth `depth` separated by a barrier of width gap
/// at the exterior level 0.
inline PotentialProfile make_double_rect_well(double b, double gap, double depth)
{
    if (!(b > 0.0))
        throw std::invalid_argument("well width must be positive");
    if (!(gap >= 0.0))
        throw std::invalid_argument("barrier width must be non-negative");
    if (!(depth > 0.0))
        throw std::invalid_argument("well depth must be positive");
    std::vector<Segment> segs;
    segs.emplace_back(Constant{-depth}, 0.0, b);
    if (gap > 0.0)
        segs.emplace_back(Constant{0.0}, b, b + gap);
    segs.emplace_back(Constant{-depth}, b + gap, b + gap + b);
    return PotentialProfile(0.0, std::move(segs), 0.0).merged();
}

/// Two touching parabolas a(x +- x0)^2 on (-2x0, 0) and (0, 2x0); exteriors
/// and the central cusp sit at a*x0^2.
inline PotentialProfile make_parabolic_double_well(double a, double x0)
{
    if (!(a > 0.0))
        throw std::invalid_argument("parabola coefficient must be positive");
    if (!(x0 > 0.0))
        throw std::invalid_argument("well offset x0 must be positive");
    const double top = a * x0 * x0;
    return PotentialProfile(top,
                            {Segment(Parabola{a, -x0}, -2.0 * x0, 0.0),
                             Segment(Parabola{a, x0}, 0.0, 2.0 * x0)},
                            top);
}

/// Coefficient giving each parabolic well the requested depth.
inline double parabolic_coefficient_for_depth(double depth, double x0) { return depth / (x0 * x0); }

/// Staircase approximation: each parabolic segment becomes n_layers constant
/// layers at the sub-interval midpoint value.
inline PotentialProfile discretize(const PotentialProfile& profile, std::size_t n_layers)
{
    if (n_layers < 1)
        throw std::invalid_argument("n_layers must be at least 1");
    std::vector<Segment> out;
    for (const auto& s : profile.segments()) {
        if (s.is_constant()) {
            out.push_back(s);
            continue;
        }
        const double w = s.width();
        double x_prev = s.start;
        for (std::size_t k = 0; k < n_layers; ++k) {
            const double x_next =
                (k + 1 == n_layers) ? s.end : s.start + w * static_cast<double>(k + 1) / n_layers;
            out.emplace_back(Constant{s.at(0.5 * (x_prev + x_next))}, x_prev, x_next);
            x_prev = x_next;
        }
    }
    return PotentialProfile(profile.left_exterior(), std::move(out), profile.right_exterior());
}

} // namespace qcap
