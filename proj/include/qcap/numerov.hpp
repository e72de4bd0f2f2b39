#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "profile.hpp"
#include "spectrum.hpp"

// Reference solver, deliberately independent of the impedance engine: it
// integrates psi'' = (U - E)/(hbar^2/2m*) psi on the continuous potential (no
// staircase) with the three-point Numerov scheme.

namespace qcap::oracle {

struct NumerovConfig {
    double dx = 1e-3; // nm, upper bound on the step inside each piece
    /// Exterior extension on each soft side. Default: 40 decay lengths of the
    /// shallowest level found, capped at max_padding.
    std::optional<double> padding;
    double max_padding = 400.0; // nm
    double energy_tol = 1e-9;   // eV
};

namespace detail {

/// One smooth piece of the potential on its own aligned grid.
struct Piece {
    double h;
    std::vector<double> u; // U at the nodes, including both ends
    // analytic derivatives of U at the ends (parabola: linear U', constant U'')
    double du_start;
    double du_end;
    double d2u;
};

struct Shot {
    int nodes;
    double end_value; // psi(x_hi) / |(psi, psi')|, continuous in energy
};

/// psi(x0 + h) from (psi, psi') at x0 by Taylor expansion through h^5, with
/// g = (U - E)/c and its derivatives at x0.
inline double taylor_step(double y, double yp, double g, double g1, double g2, double h)
{
    const double y2 = g * y;
    const double y3 = g1 * y + g * yp;
    const double y4 = (g2 + g * g) * y + 2.0 * g1 * yp;
    const double y5 = 4.0 * g * g1 * y + (3.0 * g2 + g * g) * yp;
    const double h2 = h * h;
    return y + h * yp + h2 / 2.0 * y2 + h2 * h / 6.0 * y3 + h2 * h2 / 24.0 * y4 + h2 * h2 * h / 120.0 * y5;
}

/// psi'(x_N) from psi(x_N) and psi(x_N - h), inverting the same expansion.
inline double end_slope(double y_end, double y_before, double g, double g1, double g2, double h)
{
    const double h2 = h * h, h3 = h2 * h, h4 = h3 * h, h5 = h4 * h;
    const double coef_y = 1.0 + h2 / 2.0 * g - h3 / 6.0 * g1 + h4 / 24.0 * (g2 + g * g) - h5 / 120.0 * 4.0 * g * g1;
    const double coef_yp = -h - h3 / 6.0 * g + h4 / 24.0 * 2.0 * g1 - h5 / 120.0 * (3.0 * g2 + g * g);
    return (y_before - coef_y * y_end) / coef_yp;
}

class Grid {
public:
    Grid(const PotentialProfile& profile, double pad_left, double pad_right, double dx, double kinetic_scale)
        : inv_c_(1.0 / kinetic_scale)
    {
        if (pad_left > 0.0)
            add_piece(Segment(Constant{profile.left_exterior()}, profile.x_begin() - pad_left, profile.x_begin()),
                      dx);
        for (const auto& s : profile.segments())
            add_piece(s, dx);
        if (pad_right > 0.0)
            add_piece(Segment(Constant{profile.right_exterior()}, profile.x_end(), profile.x_end() + pad_right), dx);
    }

    /// Shoots from a Dirichlet wall at the left end. By Sturm oscillation the
    /// node count equals the number of box eigenvalues below `energy`.
    Shot shoot(double energy) const
    {
        double y = 0.0;
        double yp = 1.0;
        int nodes = 0;
        auto step_sign = [&](double prev, double next) {
            if (next != 0.0 && prev != 0.0 && std::signbit(next) != std::signbit(prev))
                ++nodes;
        };
        for (const auto& p : pieces_) {
            const double h = p.h;
            const double h12 = h * h / 12.0;
            const std::size_t n = p.u.size() - 1;
            auto g = [&](std::size_t i) { return (p.u[i] - energy) * inv_c_; };
            const double g1s = p.du_start * inv_c_, g1e = p.du_end * inv_c_, g2 = p.d2u * inv_c_;
            if (std::abs(g(0)) * h12 > 0.5 || std::abs(g(n)) * h12 > 0.5)
                throw std::runtime_error("Numerov grid too coarse for this potential; reduce dx");

            double y_prev = y;
            double y_cur = taylor_step(y, yp, g(0), g1s, g2, h);
            step_sign(y_prev, y_cur);
            if (n == 1) {
                yp = end_slope(y_cur, y_prev, g(1), g1e, g2, h);
                y = y_cur;
                continue;
            }
            double w_prev = (1.0 - h12 * g(0)) * y_prev;
            double w_cur = (1.0 - h12 * g(1)) * y_cur;
            for (std::size_t i = 1; i < n; ++i) {
                const double w_next = 2.0 * w_cur - w_prev + 12.0 * h12 * g(i) * y_cur;
                const double y_next = w_next / (1.0 - h12 * g(i + 1));
                step_sign(y_cur, y_next);
                y_prev = y_cur;
                y_cur = y_next;
                w_prev = w_cur;
                w_cur = w_next;
                if (std::abs(y_cur) > 1e200) {
                    y_prev *= 1e-200;
                    y_cur *= 1e-200;
                    w_prev *= 1e-200;
                    w_cur *= 1e-200;
                }
            }
            yp = end_slope(y_cur, y_prev, g(n), g1e, g2, h);
            y = y_cur;
        }
        return {nodes, y / std::hypot(y, yp)};
    }

private:
    void add_piece(const Segment& s, double dx)
    {
        Piece p;
        const auto n = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(s.width() / dx)));
        p.h = s.width() / static_cast<double>(n);
        p.u.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i)
            p.u[i] = s.at(i == n ? s.end : s.start + p.h * static_cast<double>(i));
        if (const auto* par = std::get_if<Parabola>(&s.shape)) {
            p.du_start = 2.0 * par->coefficient * (s.start - par->center);
            p.du_end = 2.0 * par->coefficient * (s.end - par->center);
            p.d2u = 2.0 * par->coefficient;
        } else {
            p.du_start = p.du_end = p.d2u = 0.0;
        }
        pieces_.push_back(std::move(p));
    }

    double inv_c_;
    std::vector<Piece> pieces_;
};

struct Levels {
    std::vector<double> energies;
    std::vector<int> nodes;
};

// Illinois iteration on the end value inside a bracket holding one level.
inline double refine_single(const Grid& grid, double lo, double f_lo, double hi, double f_hi, double tol)
{
    int side = 0;
    for (int it = 0; it < 100 && hi - lo > tol; ++it) {
        double e = (f_hi != f_lo) ? hi - f_hi * (hi - lo) / (f_hi - f_lo) : 0.5 * (lo + hi);
        if (!(e > lo && e < hi))
            e = 0.5 * (lo + hi);
        const double f = grid.shoot(e).end_value;
        if (f == 0.0)
            return e;
        if (std::signbit(f) == std::signbit(f_hi)) {
            hi = e;
            f_hi = f;
            if (side == -1)
                f_lo *= 0.5;
            side = -1;
        } else {
            lo = e;
            f_lo = f;
            if (side == 1)
                f_hi *= 0.5;
            side = 1;
        }
        // keep bisection progress when the secant creeps from one side
        if (it % 4 == 3) {
            const double mid = 0.5 * (lo + hi);
            const double fm = grid.shoot(mid).end_value;
            if (std::signbit(fm) == std::signbit(f_hi)) {
                hi = mid;
                f_hi = fm;
            } else {
                lo = mid;
                f_lo = fm;
            }
        }
    }
    return 0.5 * (lo + hi);
}

// Bisect on the node count; once a bracket holds exactly one level and is
// narrow, finish on the continuous end value.
inline void bracket_levels(const Grid& grid, double lo, Shot s_lo, double hi, Shot s_hi, double tol,
                           double narrow, Levels& out)
{
    if (s_hi.nodes <= s_lo.nodes)
        return;
    if (s_hi.nodes - s_lo.nodes == 1 && hi - lo <= narrow) {
        out.energies.push_back(refine_single(grid, lo, s_lo.end_value, hi, s_hi.end_value, tol));
        out.nodes.push_back(s_lo.nodes);
        return;
    }
    if (hi - lo <= tol) {
        for (int k = s_lo.nodes; k < s_hi.nodes; ++k) {
            out.energies.push_back(0.5 * (lo + hi));
            out.nodes.push_back(k);
        }
        return;
    }
    const double mid = 0.5 * (lo + hi);
    const Shot s_mid = grid.shoot(mid);
    bracket_levels(grid, lo, s_lo, mid, s_mid, tol, narrow, out);
    bracket_levels(grid, mid, s_mid, hi, s_hi, tol, narrow, out);
}

inline Levels solve_box(const PotentialProfile& profile, const Material& m, double pad_left, double pad_right,
                        double dx, double lo, double hi, double tol)
{
    const Grid grid(profile, pad_left, pad_right, dx, m.kinetic_scale());
    const Shot s_lo = grid.shoot(lo);
    const Shot s_hi = grid.shoot(hi);
    if (s_lo.nodes != 0)
        throw std::runtime_error("Numerov node count at the potential minimum is not zero; reduce dx");
    Levels out;
    bracket_levels(grid, lo, s_lo, hi, s_hi, tol, 1e-3 * (hi - lo), out);
    return out;
}

} // namespace detail

/// Bound levels from Numerov shooting with Sturm node counting on a padded
/// box. Each potential piece gets its own aligned grid so jumps and kinks sit
/// on nodes; psi and psi' are carried across piece boundaries. Hard-wall
/// exteriors become Dirichlet ends at the profile edge. Level k has k nodes.
inline BoundSpectrum numerov_bound_states(const PotentialProfile& profile, const Material& m,
                                          const NumerovConfig& cfg = {}, std::optional<double> max_energy = {})
{
    if (!(cfg.dx > 0.0))
        throw std::invalid_argument("dx must be positive");
    if (!(cfg.energy_tol > 0.0))
        throw std::invalid_argument("energy_tol must be positive");
    const double lo = profile.minimum();
    double hi = profile.window_top();
    if (max_energy)
        hi = std::min(hi, *max_energy);
    const double c = m.kinetic_scale();
    const bool hard_left = is_hard_wall(profile.left_exterior());
    const bool hard_right = is_hard_wall(profile.right_exterior());

    auto pad_for = [&](double energy, bool hard, double exterior) {
        if (hard)
            return 0.0;
        if (cfg.padding)
            return *cfg.padding;
        const double kappa = std::sqrt(std::max(exterior - energy, 0.0) / c);
        return kappa > 0.0 ? std::min(cfg.max_padding, 40.0 / kappa) : cfg.max_padding;
    };
    auto solve = [&](double pl, double pr) {
        return detail::solve_box(profile, m, pl, pr, cfg.dx, lo, hi, cfg.energy_tol);
    };

    // first pass sized for a level at 90% of the window, then widen to the
    // decay length of the shallowest level actually found
    const double probe = lo + 0.9 * (hi - lo);
    double pl = pad_for(probe, hard_left, profile.left_exterior());
    double pr = pad_for(probe, hard_right, profile.right_exterior());
    auto levels = solve(pl, pr);
    if (!levels.energies.empty() && !cfg.padding) {
        const double top = levels.energies.back();
        const double need_l = pad_for(top, hard_left, profile.left_exterior());
        const double need_r = pad_for(top, hard_right, profile.right_exterior());
        if (need_l > pl || need_r > pr)
            levels = solve(std::max(pl, need_l), std::max(pr, need_r));
    }
    for (std::size_t i = 0; i < levels.nodes.size(); ++i)
        if (levels.nodes[i] != static_cast<int>(i))
            throw std::runtime_error("Numerov node sequence is not monotone; reduce dx");

    BoundSpectrum s;
    s.method = Method::Numerov;
    s.energies = std::move(levels.energies);
    s.residuals.assign(s.energies.size(), 0.0);
    s.node_counts = std::move(levels.nodes);
    return s;
}

} // namespace qcap::oracle
