#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "wigwall/boundary_kernels.hpp"

using namespace wigwall;
using wigwall::testing::bounce_grid;
using wigwall::testing::max_diff;

namespace {

double max_lag_diff(const BoundaryKernel& a, const BoundaryKernel& b) { return max_diff(a.lags, b.lags); }

}  // namespace

TEST(HalflineKernel, ValuesAndZeroColumn) {
    const auto g = bounce_grid();
    const auto k = halfline_kernel(g);
    const std::size_t z = *g.zero_p_index();
    for (std::size_t i = 0; i < g.n_x(); ++i) {
        const double x = g.x(i);
        EXPECT_DOUBLE_EQ(k.at(i, z), x > 0.0 ? 2.0 * x / std::numbers::pi : 0.0);
        if (x <= 0.0) {
            for (double v : k.row(i)) ASSERT_EQ(v, 0.0);
        }
    }
    EXPECT_EQ(k.provenance, KernelProvenance::AnalyticHalfline);
    EXPECT_EQ(to_string(k.provenance), "analytic-halfline");
}

TEST(HalflineKernel, UnitMassInsideAndEven) {
    const auto g = bounce_grid();
    const auto k = halfline_kernel(g);
    const auto tail = kernel_tail_mass(k);
    // The lattice sum over all j of sin(2 x j dp) / (pi j) is exactly 1; cutting it
    // at |j| <= J leaves at most about 1 / (pi J sin(x dp)).
    const double dp = g.dp();
    const double big_j = static_cast<double>(g.n_p() - 1);
    for (std::size_t i = 0; i < g.n_x(); ++i) {
        const double x = g.x(i);
        if (x > 1.0) {
            EXPECT_LT(std::abs(tail[i]), 1.1 / (std::numbers::pi * big_j * std::sin(x * dp))) << "x " << x;
        }
        const auto lag = k.lag_row(i);
        for (std::size_t q = 0; q < lag.size(); ++q) ASSERT_EQ(lag[q], lag[lag.size() - 1 - q]);
    }
}

TEST(HalflineKernel, Scaling) {
    for (double lambda : {0.5, 2.0, 3.7})
        for (double x : {0.3, 1.0, 4.2})
            for (double p : {-2.1, 0.0, 0.77, 5.0})
                EXPECT_NEAR(halfline_profile(lambda * x, p / lambda), lambda * halfline_profile(x, p), 1e-9);
}

TEST(IntervalKernel, MidpointAndOutside) {
    const auto g = bounce_grid();
    const auto k = interval_kernel(g, -7.5, 15.0);
    const double len = 22.5;
    const auto mid = g.x_axis().node_of(3.75);
    ASSERT_TRUE(mid);
    for (std::size_t j = 0; j < g.n_p(); j += 7)
        EXPECT_NEAR(k.at(*mid, j), sin_over_pi_p(len, g.p(j)), 1e-15);
    for (std::size_t i = 0; i < g.n_x(); ++i)
        if (g.x(i) <= -7.5 || g.x(i) >= 15.0) {
            ASSERT_FALSE(k.inside[i]);
        }
}

TEST(IntervalKernel, FarWallReducesToHalfline) {
    const auto g = bounce_grid();
    const double a = -15.0;
    const auto box = interval_kernel(g, a, g.x_max());
    const auto half = halfline_kernel(g, a);
    // Rows nearer a than the far wall see only the near wall.
    for (std::size_t i = 0; i < g.n_x(); ++i)
        if (g.x(i) - a < g.x_max() - g.x(i)) {
            ASSERT_LT(max_diff(box.row(i), half.row(i)), 1e-6);
        }
}

TEST(IntervalKernel, BadInterval) {
    const auto g = bounce_grid();
    try {
        interval_kernel(g, 2.0, 2.0);
        FAIL() << "expected BadInterval";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::BadInterval);
    }
}

TEST(NumericKernel, RectMatchesAnalytic) {
    // Cells of width dy centred at odd multiples of dy/2: rect |y| < 2 x0 with 2 x0 on a cell edge.
    const double dy = 0.05, x0 = 1.5;
    const std::size_t n = 400;
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double y = (static_cast<double>(k) - 0.5 * (n - 1)) * dy;
        g[k] = std::abs(y) < 2.0 * x0 ? 1.0 : 0.0;
    }
    const Axis p{-10.0, 0.05, 401};
    const auto out = numeric_kernel(g, dy, p);
    for (std::size_t j = 0; j < p.count; ++j) EXPECT_NEAR(out[j], sin_over_pi_p(2.0 * x0, p.at(j)), 1e-12);
}

TEST(NumericKernel, ZeroAndConstantIndicators) {
    const Axis p{-20.0, 0.05, 801};
    const auto zero = numeric_kernel(std::vector<double>(64, 0.0), 0.1, p);
    for (double v : zero) EXPECT_EQ(v, 0.0);
    const auto ones = numeric_kernel(std::vector<double>(64, 1.0), 0.1, p);
    double mass = 0.0;
    for (double v : ones) mass += v * p.step;
    // Window |p| < 20 on a width-6.4 rect leaves a sinc tail of order 1 / (pi 3.2 20).
    EXPECT_LT(std::abs(mass - 1.0), 1.0 / (std::numbers::pi * 3.2 * 20.0));
    EXPECT_NEAR(ones[400], 6.4 / (2.0 * std::numbers::pi), 1e-12);
}

TEST(NumericKernel, AsymmetricIndicatorRejected) {
    std::vector<double> g(10, 0.0);
    g[2] = 1.0;
    try {
        numeric_kernel(g, 0.1, Axis{-1.0, 0.1, 21});
        FAIL() << "expected AsymmetricIndicator";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::AsymmetricIndicator);
    }
}

TEST(NumericKernelField, ReproducesAnalyticKernels) {
    const auto g = bounce_grid();
    const auto hn = numeric_kernel_field(g, [](double x) { return 1.0 - x; }, "wall=0");
    const auto ha = halfline_kernel(g);
    EXPECT_LT(max_diff(hn.values, ha.values), 1e-6);
    EXPECT_LT(max_lag_diff(hn, ha), 1e-6);
    EXPECT_EQ(hn.inside, ha.inside);

    const auto in = numeric_kernel_field(g, [](double x) { return std::abs(x - 3.75) / 11.25; }, "a=-7.5 b=15");
    const auto ia = interval_kernel(g, -7.5, 15.0);
    EXPECT_LT(max_diff(in.values, ia.values), 1e-6);
    EXPECT_LT(max_lag_diff(in, ia), 1e-6);
}

TEST(Billiard, DiskIndicatorAtCentre) {
    const double r = 1.0;
    const Axis x0{0.0, 1.0, 1};
    const Axis y = symmetric_axis(0.1, 60);
    const auto s = billiard_indicator(disk_level_set(r), {x0, x0}, {y, y});
    for (std::size_t a = 0; a < y.count; ++a)
        for (std::size_t b = 0; b < y.count; ++b) {
            const double ya = y.at(a), yb = y.at(b);
            ASSERT_EQ(s.at(0, a * y.count + b), std::hypot(ya, yb) < 2.0 * r);
        }
}

TEST(Billiard, OutsidePointsHaveEmptySlices) {
    const Axis xs{-3.0, 1.5, 5};
    const Axis y = symmetric_axis(0.1, 40);
    const auto s = billiard_indicator(disk_level_set(1.0), {xs, xs}, {y, y});
    const std::size_t corner = 0;  // (-3, -3)
    for (auto v : s.slice(corner)) ASSERT_EQ(v, 0);
    EXPECT_THROW(billiard_indicator(disk_level_set(1.0), {Axis{5.0, 1.0, 3}, xs}, {y, y}), Error);
}

TEST(Billiard, BoundaryPointSeesOnlyStrictInterior) {
    const Axis x1{0.0, 1.0, 2};
    const Axis x0{0.0, 1.0, 1};
    const Axis y = symmetric_axis(0.05, 80);
    const auto s = billiard_indicator(disk_level_set(1.0), {x1, x0}, {y, y});
    std::size_t on = 0;
    for (auto v : s.slice(1)) on += v;  // x = (1, 0)
    // x + y/2 and x - y/2 cannot both lie strictly inside the unit disk when |x| = 1.
    EXPECT_EQ(on, 0u);
}

TEST(Billiard, OneDimensionalIndicatorMatchesHalfline) {
    const auto g = PhaseGrid::from_spacing(-8.0, 0.125, 128, -6.0, 0.125, 96);
    const Axis y = symmetric_axis(0.25, 256);
    const auto s = billiard_indicator([](std::span<const double> x) { return 1.0 - x[0]; }, {g.x_axis()}, {y});
    const auto k = kernel_from_indicator(s, {g.p_axis()});
    const auto ref = halfline_kernel(g);
    EXPECT_LT(max_diff(k.values, ref.values), 1e-6);
}

TEST(Billiard, SeparableBoxFactorizes) {
    const Axis xs{-1.0, 0.25, 9};
    const Axis y = symmetric_axis(0.05, 160);
    const Axis p = symmetric_axis(0.2, 41);
    const auto s = billiard_indicator(box_level_set({-1.5, -1.0}, {1.5, 2.0}), {xs, xs}, {y, y});
    const auto k = kernel_from_indicator(s, {p, p});
    double err = 0.0;
    for (std::size_t a = 0; a < k.x_points(); ++a) {
        const double x1 = xs.at(a / xs.count), x2 = xs.at(a % xs.count);
        for (std::size_t j = 0; j < k.p_points(); ++j) {
            const double ref = interval_profile(x1, p.at(j / p.count), -1.5, 1.5) *
                               interval_profile(x2, p.at(j % p.count), -1.0, 2.0);
            err = std::max(err, std::abs(k.at(a, j) - ref));
        }
    }
    EXPECT_LT(err, 1e-6);
}

TEST(Billiard, DiskKernelSymmetry) {
    const Axis x0{0.0, 1.0, 1};
    const Axis y = symmetric_axis(0.05, 164);
    const Axis p = symmetric_axis(0.1, 41);
    const auto k = kernel_from_indicator(billiard_indicator(disk_level_set(2.0), {x0, x0}, {y, y}), {p, p});
    EXPECT_LT(square_symmetry_defect(k, 0), 1e-12);
    // True rotational symmetry is limited by the pixelated disk edge.
    EXPECT_LT(ring_anisotropy(k, 0), 5e-3);
    // Centre value: area of the |y| < 2R disk over (2 pi)^2.
    EXPECT_NEAR(k.at(0, 20 * 41 + 20), 4.0 * std::numbers::pi * 4.0 / (4.0 * std::numbers::pi * std::numbers::pi), 1e-3);
}
