#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "wigwall/phase_grid.hpp"

namespace wigwall::testing {

/// 512 x 512 over x in [-30, 30), p in [-12, 12): 0 is a node of both axes.
inline PhaseGrid bounce_grid(std::size_t n = 512) {
    return PhaseGrid::from_spacing(-30.0, 60.0 / static_cast<double>(n), n, -12.0, 24.0 / static_cast<double>(n), n);
}

/// Closed-form Wigner function of the unit Gaussian packet (x0, p0, sigma).
inline double gaussian_wigner(double x, double p, double x0, double p0, double sigma) {
    const double u = x - x0, v = p - p0;
    return std::exp(-u * u / (2.0 * sigma * sigma) - 2.0 * sigma * sigma * v * v) / std::numbers::pi;
}

inline WignerField gaussian_field(const PhaseGrid& g, double x0, double p0, double sigma) {
    WignerField w(g);
    for (std::size_t i = 0; i < g.n_x(); ++i)
        for (std::size_t j = 0; j < g.n_p(); ++j) w.at(i, j) = gaussian_wigner(g.x(i), g.p(j), x0, p0, sigma);
    return w;
}

inline double max_diff(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
    return d;
}

}  // namespace wigwall::testing
