#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "impedance.hpp"
#include "kummer.hpp"
#include "profile.hpp"

// Exact solutions for the parabolic double well
//   U(x) = a (x + x0)^2 on (-2x0, 0),  a (x - x0)^2 on (0, 2x0),  a x0^2 outside.
// In each region with center xc the pair
//   psi = M(alpha, 1/2, g y^2) e(x),   phi = y M(alpha + 1/2, 3/2, g y^2) e(x),
//   y = x - xc,  e(x) = exp(-g x (x - 2 xc) / 2)
// spans the solutions, with g = sqrt(2 a m*)/hbar and alpha = (1 - g E / a)/4.

namespace qcap::specfun {

struct KummerParams {
    double alpha;
    double gamma; // 1/nm^2
};

inline KummerParams kummer_params(double energy, double a, const Material& m)
{
    if (!(a > 0.0))
        throw std::invalid_argument("parabola coefficient must be positive");
    const double gamma = std::sqrt(a / m.kinetic_scale());
    return {-0.25 * (gamma * energy / a - 1.0), gamma};
}

enum class Region { Left, Right };

inline double region_center(Region r, double x0) { return r == Region::Left ? -x0 : x0; }

struct ParabolicBasisEval {
    double psi;
    double phi;  // nm
    double dpsi; // 1/nm
    double dphi;
};

namespace detail {

// No interval check: the matching system evaluates on region boundaries.
inline ParabolicBasisEval basis_at(const KummerParams& p, double xc, double x)
{
    const double y = x - xc;
    const double t = p.gamma * y * y;
    const double alpha = p.alpha;
    const double pref = std::exp(-0.5 * p.gamma * x * (x - 2.0 * xc));
    const double m_even = kummer_m(alpha, 0.5, t);
    const double m_even_up = kummer_m(alpha + 1.0, 1.5, t);
    const double m_odd = kummer_m(alpha + 0.5, 1.5, t);
    const double m_odd_up = kummer_m(alpha + 1.5, 2.5, t);
    return {
        m_even * pref,
        y * m_odd * pref,
        p.gamma * y * (4.0 * alpha * m_even_up - m_even) * pref,
        ((1.0 - t) * m_odd + (2.0 / 3.0) * (2.0 * alpha + 1.0) * t * m_odd_up) * pref,
    };
}

inline double exterior_decay(double energy, double a, double x0, const Material& m)
{
    const double top = a * x0 * x0;
    if (!(energy > 0.0 && energy < top))
        throw std::domain_error("energy outside the parabolic bound-state window (0, a x0^2)");
    return std::sqrt((top - energy) / m.kinetic_scale());
}

template <int N>
double scaled_determinant(Eigen::Matrix<double, N, N> mat)
{
    for (int r = 0; r < N; ++r) {
        const double s = mat.row(r).cwiseAbs().maxCoeff();
        if (s > 0.0)
            mat.row(r) /= s;
    }
    return mat.partialPivLu().determinant();
}

} // namespace detail

/// psi, phi and their derivatives in one region; x must lie in the region's
/// open interval ((-2x0, 0) for Left, (0, 2x0) for Right).
inline ParabolicBasisEval parabolic_basis(double energy, double a, double x0, const Material& m, double x,
                                          Region region)
{
    if (!(x0 > 0.0))
        throw std::invalid_argument("x0 must be positive");
    const bool inside = region == Region::Left ? (x > -2.0 * x0 && x < 0.0) : (x > 0.0 && x < 2.0 * x0);
    if (!inside)
        throw std::domain_error("parabolic_basis: x outside the region");
    return detail::basis_at(kummer_params(energy, a, m), region_center(region, x0), x);
}

enum class EliminationOrder { LeftFirst, RightFirst };

/// Determinant of the 6x6 continuity system (value and slope at -2x0, 0, 2x0)
/// over unknowns [A_left, c1, d1, c2, d2, A_right]. Rows are equilibrated by
/// their largest magnitude, a positive factor that keeps the zeros and sign
/// structure. RightFirst reverses the unknown and equation order.
inline double parabolic_matching_determinant(double energy, double a, double x0, const Material& m,
                                             EliminationOrder order = EliminationOrder::LeftFirst)
{
    const double kappa = detail::exterior_decay(energy, a, x0, m);
    const auto p = kummer_params(energy, a, m);
    const auto l_out = detail::basis_at(p, -x0, -2.0 * x0);
    const auto l_mid = detail::basis_at(p, -x0, 0.0);
    const auto r_mid = detail::basis_at(p, x0, 0.0);
    const auto r_out = detail::basis_at(p, x0, 2.0 * x0);

    Eigen::Matrix<double, 6, 6> sys = Eigen::Matrix<double, 6, 6>::Zero();
    sys.row(0) << 1.0, -l_out.psi, -l_out.phi, 0.0, 0.0, 0.0;
    sys.row(1) << kappa, -l_out.dpsi, -l_out.dphi, 0.0, 0.0, 0.0;
    sys.row(2) << 0.0, l_mid.psi, l_mid.phi, -r_mid.psi, -r_mid.phi, 0.0;
    sys.row(3) << 0.0, l_mid.dpsi, l_mid.dphi, -r_mid.dpsi, -r_mid.dphi, 0.0;
    sys.row(4) << 0.0, 0.0, 0.0, r_out.psi, r_out.phi, -1.0;
    sys.row(5) << 0.0, 0.0, 0.0, r_out.dpsi, r_out.dphi, kappa;

    if (order == EliminationOrder::RightFirst)
        sys = sys.colwise().reverse().rowwise().reverse().eval();
    return detail::scaled_determinant<6>(sys);
}

/// Half-system determinant for one parity sector: the right region and right
/// exterior with psi'(0) = 0 (even) or psi(0) = 0 (odd).
inline double parabolic_parity_determinant(double energy, double a, double x0, const Material& m,
                                           impedance::Parity parity)
{
    const double kappa = detail::exterior_decay(energy, a, x0, m);
    const auto p = kummer_params(energy, a, m);
    const auto mid = detail::basis_at(p, x0, 0.0);
    const auto out = detail::basis_at(p, x0, 2.0 * x0);

    Eigen::Matrix3d sys;
    if (parity == impedance::Parity::Even)
        sys.row(0) << mid.dpsi, mid.dphi, 0.0;
    else
        sys.row(0) << mid.psi, mid.phi, 0.0;
    sys.row(1) << out.psi, out.phi, -1.0;
    sys.row(2) << out.dpsi, out.dphi, kappa;
    return detail::scaled_determinant<3>(sys);
}

} // namespace qcap::specfun
