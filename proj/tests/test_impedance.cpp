#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include <qcap/impedance.hpp>
#include <qcap/numerov.hpp>
#include <qcap/spectrum.hpp>

using namespace qcap;
using namespace qcap::impedance;

namespace {

// Ground state of the a = 5 nm, U = 10 eV, m* = 0.1 well, frozen from the
// Numerov oracle (dx = 1e-3 nm).
constexpr double kFiniteWellGround = -9.8706260231;

} // namespace

TEST(LayerKinematics, PropagatingAndEvanescent)
{
    const Material m(0.1);
    const auto in = layer_kinematics(-5.0, -10.0, m);
    EXPECT_EQ(in.regime, Regime::Propagating);
    EXPECT_NEAR(in.wavenumber, 3.6227, 1e-4);
    EXPECT_NEAR(in.wavenumber, std::sqrt(5.0 * 0.1 / constants::hbar2_over_2m0), 1e-12);
    EXPECT_NEAR(in.characteristic_impedance_magnitude, std::sqrt(2.0 * 5.0 / 0.1), 1e-12);

    const auto out = layer_kinematics(-5.0, 0.0, m);
    EXPECT_EQ(out.regime, Regime::Evanescent);
    EXPECT_DOUBLE_EQ(out.wavenumber, in.wavenumber);

    const auto tie = layer_kinematics(-2.0, -2.0, m);
    EXPECT_EQ(tie.regime, Regime::Evanescent);
    EXPECT_EQ(tie.wavenumber, 0.0);
}

TEST(ImpedanceConverter, RoundTripAndDecayConvention)
{
    const Material m(0.067);
    for (double L : {-3.0, -0.25, 0.0, 1.5}) {
        const auto z = impedance_from_logderiv(L, m);
        EXPECT_EQ(z.real(), 0.0);
        EXPECT_NEAR(logderiv_from_impedance(z, m), L, 1e-14);
    }
    // hbar kappa / m* carried by a decaying wave equals the characteristic
    // impedance magnitude sqrt(2 |E - U| / m*)
    const auto kin = layer_kinematics(-0.3, 0.0, m);
    EXPECT_NEAR(std::abs(impedance_from_logderiv(-kin.wavenumber, m)), kin.characteristic_impedance_magnitude,
                1e-12 * kin.characteristic_impedance_magnitude);
}

TEST(PropagateThroughLayer, DecayingSolutionIsAFixedPoint)
{
    const Material m(0.1);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ud(0.01, 60.0), ugap(0.01, 20.0);
    for (int i = 0; i < 200; ++i) {
        const double U = 0.0, E = -ugap(rng), d = ud(rng);
        const double kappa = layer_kinematics(E, U, m).wavenumber;
        const double L = propagate_through_layer(-kappa, E, U, d, m);
        EXPECT_NEAR(L, -kappa, 1e-12 * kappa) << "E=" << E << " d=" << d;
    }
}

TEST(PropagateThroughLayer, CompositionOfThicknesses)
{
    const Material m(0.2);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ud(0.01, 5.0), uL(-5.0, 5.0), uE(-3.0, 3.0);
    int checked = 0;
    for (int i = 0; i < 500; ++i) {
        const double E = uE(rng), U = 0.0, d1 = ud(rng), d2 = ud(rng), L = uL(rng);
        const double both = propagate_through_layer(L, E, U, d1 + d2, m);
        const double step = propagate_through_layer(propagate_through_layer(L, E, U, d2, m), E, U, d1, m);
        if (!std::isfinite(both) || std::abs(both) > 1e3)
            continue; // near a pole the relative comparison is ill-conditioned
        EXPECT_NEAR(step, both, 1e-12 * std::max(1.0, std::abs(both))) << "E=" << E;
        ++checked;
    }
    EXPECT_GT(checked, 400);
}

TEST(PropagateThroughLayer, ThinLayerLimit)
{
    const Material m(0.1);
    for (double E : {-3.0, 0.0, 2.0})
        EXPECT_NEAR(propagate_through_layer(0.7, E, 0.0, 1e-12, m), 0.7, 1e-10);
}

TEST(PropagateThroughLayer, TopOfLayerLinearLimit)
{
    const Material m(0.1);
    const double L = 0.8, d = 0.5;
    // leftward transfer of psi = 1 + L (x - x_out) through a flat layer
    EXPECT_NEAR(propagate_through_layer(L, 1.0, 1.0, d, m), L / (1.0 - L * d), 1e-14);
    // continuity across the tie
    const double eps = 1e-9;
    EXPECT_NEAR(propagate_through_layer(L, 1.0 + eps, 1.0, d, m), L / (1.0 - L * d), 1e-8);
    EXPECT_NEAR(propagate_through_layer(L, 1.0 - eps, 1.0, d, m), L / (1.0 - L * d), 1e-8);
}

TEST(PropagateThroughLayer, PoleGivesSignedInfinity)
{
    const Material m(0.1);
    // L_load = 1/d through a kappa = 0 layer puts psi = 0 at the input
    const double L = propagate_through_layer(2.0, 1.0, 1.0, 0.5, m);
    EXPECT_TRUE(std::isinf(L));
    EXPECT_THROW(propagate_through_layer(0.1, 0.0, 0.0, 0.0, m), std::invalid_argument);
}

TEST(PropagateThroughLayer, WideBarrierDoesNotOverflow)
{
    const Material m(0.1);
    // kappa d ~ 500
    const double L = propagate_through_layer(3.0, -9.0, 0.0, 100.0, m);
    const double kappa = layer_kinematics(-9.0, 0.0, m).wavenumber;
    ASSERT_TRUE(std::isfinite(L));
    EXPECT_NEAR(L, -kappa, 1e-12 * kappa);
}

TEST(MatchingResidual, VanishesAtOracleGroundState)
{
    const Material m(0.1);
    const auto p = make_finite_well(5.0, 10.0);
    const auto r = matching_residual(p, kFiniteWellGround, m);
    EXPECT_TRUE(r.valid);
    EXPECT_LT(std::abs(r.value), 1e-8);
    EXPECT_LT(std::abs(r.continuous), 1e-8);
    EXPECT_LE(std::abs(r.value), 2.0);
    // binding energy sits between the infinite-well value and the effective-width estimate
    EXPECT_LT(kFiniteWellGround + 10.0, infinite_well_levels(5.0, m, 1).energies[0]);
    EXPECT_NEAR(kFiniteWellGround + 10.0,
                infinite_well_levels(5.0 + 2.0 / std::sqrt(10.0 / m.kinetic_scale()), m, 1).energies[0], 1e-4);

    const auto off = matching_residual(p, kFiniteWellGround + 1e-3, m);
    EXPECT_GT(std::abs(off.value), 1e-5);
}

TEST(MatchingResidual, ZerosMatchTheNumerovOracle)
{
    const Material m(0.1);
    const auto p = make_finite_well(5.0, 10.0);
    const auto oracle = oracle::numerov_bound_states(p, m);
    ASSERT_EQ(oracle.size(), 9u);
    for (double e : oracle.energies) {
        const auto r = matching_residual(p, e, m);
        EXPECT_TRUE(r.valid);
        EXPECT_LT(std::abs(r.value), 1e-8) << "E = " << e;
    }
}

TEST(MatchingResidual, WindowAndShapeChecks)
{
    const Material m(0.1);
    const auto p = make_finite_well(5.0, 10.0);
    EXPECT_THROW(matching_residual(p, 0.5, m), std::domain_error);
    EXPECT_THROW(matching_residual(p, -10.5, m), std::domain_error);
    EXPECT_THROW(matching_residual(make_parabolic_double_well(0.4, 5.0), 1.0, m), std::invalid_argument);
}

TEST(MatchingResidual, MirrorSweepAgreesOnSymmetricProfiles)
{
    const Material m(0.1);
    const auto p = make_double_rect_well(5.0, 2.0, 10.0);
    for (int i = 1; i < 400; ++i) {
        const double e = -10.0 + 10.0 * i / 400.0;
        const auto rl = matching_residual(p, e, m, Sweep::RightToLeft);
        const auto lr = matching_residual(p, e, m, Sweep::LeftToRight);
        EXPECT_NEAR(rl.value, lr.value, 1e-10) << "E = " << e;
    }
}

TEST(MatchingResidual, ContinuousFormHasNoPoles)
{
    const Material m(0.1);
    const auto p = make_finite_well(5.0, 10.0);
    // D flips sign at poles as well as at roots; the continuous form only at roots
    int d_flips = 0, w_flips = 0;
    auto prev = matching_residual(p, -10.0 + 1e-4, m);
    for (int i = 1; i < 20000; ++i) {
        const auto cur = matching_residual(p, -10.0 + 10.0 * (i + 0.5) / 20000.0, m);
        d_flips += std::signbit(cur.value) != std::signbit(prev.value);
        w_flips += std::signbit(cur.continuous) != std::signbit(prev.continuous);
        prev = cur;
    }
    EXPECT_EQ(w_flips, 9);
    EXPECT_GT(d_flips, w_flips);
}

TEST(MatchingResidual, ZerosMatchFiniteWellClosedForm)
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> ua(1.0, 10.0), uU(0.2, 10.0), um(0.05, 0.5);
    for (int t = 0; t < 10; ++t) {
        const double a = ua(rng), U = uU(rng);
        const Material m(um(rng));
        const auto closed = finite_well_levels(a, U, m);
        ScanConfig cfg;
        cfg.parity_split = ParitySplit::Off;
        const auto scanned = bound_states(make_finite_well(a, U), m, cfg);
        ASSERT_EQ(closed.size(), scanned.size());
        for (std::size_t i = 0; i < closed.size(); ++i)
            EXPECT_NEAR(closed.energies[i], scanned.energies[i], 1e-9);
    }
}

TEST(MatchingResidual, CollapsedDoubleWellEqualsWideSingleWell)
{
    const Material m(0.1);
    const auto single = make_finite_well(10.0, 10.0);
    // the unmerged pair of adjacent wells as well as the zero-gap factory
    const PotentialProfile touching(0.0, {Segment(Constant{-10.0}, 0.0, 5.0), Segment(Constant{-10.0}, 5.0, 10.0)},
                                    0.0);
    const auto collapsed = make_double_rect_well(5.0, 0.0, 10.0);
    for (int i = 1; i < 500; ++i) {
        const double e = -10.0 + 10.0 * i / 500.0;
        const auto ref = matching_residual(single, e, m);
        EXPECT_NEAR(matching_residual(touching, e, m).continuous, ref.continuous, 1e-10);
        EXPECT_NEAR(matching_residual(collapsed, e, m).continuous, ref.continuous, 1e-10);
        if (ref.valid && std::abs(ref.value) < 0.999)
            EXPECT_NEAR(matching_residual(touching, e, m).value, ref.value, 1e-10);
    }
}

TEST(ParityResidual, SectorsSplitTheSpectrum)
{
    const Material m(0.1);
    const auto p = make_double_rect_well(5.0, 2.0, 10.0);
    const auto half = p.right_half();
    // sectors alternate: ground state even, first excited odd
    const auto spectrum = bound_states(p, m);
    ASSERT_GE(spectrum.size(), 2u);
    const auto flips = [&](double e, Parity p) {
        const double h = 1e-7;
        return parity_residual(half, 0.0, e - h, m, p) * parity_residual(half, 0.0, e + h, m, p) < 0.0;
    };
    EXPECT_TRUE(flips(spectrum.energies[0], Parity::Even));
    EXPECT_TRUE(flips(spectrum.energies[1], Parity::Odd));
    EXPECT_FALSE(flips(spectrum.energies[0], Parity::Odd));
    EXPECT_GT(std::abs(parity_residual(half, 0.0, spectrum.energies[0], m, Parity::Odd)), 1e-4);
}
