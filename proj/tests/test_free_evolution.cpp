#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "wigwall/free_evolution.hpp"
#include "wigwall/oracle.hpp"
#include "wigwall/wigner_transform.hpp"

using namespace wigwall;
using wigwall::testing::gaussian_field;
using wigwall::testing::max_diff;

namespace {

PhaseGrid grid() { return PhaseGrid::from_spacing(-20.0, 40.0 / 256, 256, -4.0, 8.0 / 128, 128); }

double rel(const WignerField& a, const WignerField& b) { return max_diff(a.values(), b.values()) / max_abs(b); }

}  // namespace

TEST(Shear, ZeroTimeIsIdentity) {
    const auto w = gaussian_field(grid(), 1.0, 0.5, 1.0);
    const auto s = shear_evolve(w, ShearParams(0.0, 1.0));
    EXPECT_EQ(max_diff(s.values(), w.values()), 0.0);
}

TEST(Shear, MatchesWignerOfDispersedPacket) {
    const auto g = grid();
    const GaussianPacket pk{-3.0, 1.0, 1.0, 1.0};
    const Axis ax{g.x_min() - 10.0, g.dx(), g.n_x() + 128};
    const auto w0 = wigner_of(free_gaussian(pk, 0.0, ax), g);
    for (double t : {1.0, 2.0, 4.0}) {
        const auto wt = wigner_of(free_gaussian(pk, t, ax), g);
        EXPECT_LT(rel(shear_evolve(w0, ShearParams(t, 1.0)), wt), 1e-9) << "t " << t;
    }
}

TEST(Shear, GroupLawAndReversal) {
    const auto w = gaussian_field(grid(), -2.0, 0.7, 1.2);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 6; ++trial) {
        const double t1 = u(rng), t2 = u(rng), m = 0.5 + std::abs(u(rng));
        const auto a = shear_evolve(shear_evolve(w, ShearParams(t1, m)), ShearParams(t2, m));
        const auto b = shear_evolve(w, ShearParams(t1 + t2, m));
        EXPECT_LT(rel(a, b), 2 * kFourierShiftTolerance);
        const auto back = shear_evolve(shear_evolve(w, ShearParams(t1, m)), ShearParams(-t1, m));
        EXPECT_LT(rel(back, w), 2 * kFourierShiftTolerance);
    }
}

TEST(Shear, ConservesMarginalInMomentum) {
    const auto w = gaussian_field(grid(), 0.0, 1.0, 1.0);
    const auto s = shear_evolve(w, ShearParams(3.0, 2.0));
    EXPECT_LT(max_diff(marginal_p(s), marginal_p(w)), 1e-12);
    EXPECT_NEAR(total_mass(s), total_mass(w), 1e-12);
}

TEST(Shear, HeavierParticleMovesLess) {
    const auto w = gaussian_field(grid(), 0.0, 2.0, 1.0);
    const auto a = shear_evolve(w, ShearParams(2.0, 2.0));
    const auto b = shear_evolve(w, ShearParams(1.0, 1.0));
    EXPECT_LT(rel(a, b), 1e-12);
}

TEST(Shear, SupportEscapeDetected) {
    const auto w = gaussian_field(grid(), 10.0, 3.0, 1.0);
    try {
        shear_evolve(w, ShearParams(4.0, 1.0));
        FAIL() << "expected SupportEscaped";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SupportEscaped);
    }
}

TEST(Shear, InvalidParametersRejected) {
    EXPECT_THROW(ShearParams(1.0, 0.0), Error);
    EXPECT_THROW(ShearParams(NAN, 1.0), Error);
}

TEST(Shear, CubicSchemeTracksFourier) {
    const auto w = gaussian_field(grid(), 0.0, 1.0, 1.5);
    ShearOptions cubic{ShiftScheme::Cubic, true};
    const auto a = shear_evolve(w, ShearParams(1.3, 1.0), cubic);
    const auto b = shear_evolve(w, ShearParams(1.3, 1.0));
    EXPECT_LT(rel(a, b), 1e-3);
}

TEST(NaiveEvolution, EmptiesTheWedgeBehindTheWall) {
    const auto g = grid();
    const auto w = gaussian_field(g, 3.0, -2.0, 1.0);
    const double t = 2.0;
    const auto n = naive_bounded_evolve(w, ShearParams(t, 1.0));
    // Zero where x <= p t / m, but not where x <= 0 once p < 0 content has moved left.
    for (std::size_t i = 0; i < g.n_x(); ++i)
        for (std::size_t j = 0; j < g.n_p(); ++j)
            if (g.x(i) < g.p(j) * t - 0.5) {
                EXPECT_LT(std::abs(n.at(i, j)), 1e-3 * max_abs(w));
            }
    EXPECT_GT(wall_violation_mass(n), 1e-3);
}
