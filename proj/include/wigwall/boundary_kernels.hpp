#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wigwall/fft.hpp"
#include "wigwall/parallel.hpp"
#include "wigwall/phase_grid.hpp"

namespace wigwall {

enum class KernelProvenance { AnalyticHalfline, AnalyticInterval, Numeric };

constexpr std::string_view to_string(KernelProvenance p) noexcept {
    switch (p) {
        case KernelProvenance::AnalyticHalfline: return "analytic-halfline";
        case KernelProvenance::AnalyticInterval: return "analytic-interval";
        case KernelProvenance::Numeric: return "numeric";
    }
    return "unknown";
}

/// K(x, p): Fourier transform over y of the wall indicator g(x, y), including
/// the 1/(2 pi) convention of the Wigner transform.
///
/// `values` samples K on the grid momenta. `lags` samples the same rows on the
/// symmetric lag axis q_k = (k - (n_p - 1)) * dp, k < 2 n_p - 1, which covers
/// every difference p_j - p_l of two grid momenta; the momentum convolution
/// reads the lag rows so that no part of the kernel inside that range is cut.
struct BoundaryKernel {
    PhaseGrid grid;
    KernelProvenance provenance = KernelProvenance::Numeric;
    std::string geometry;  // e.g. "wall=0" or "a=0 b=10"
    std::vector<double> values;
    std::vector<double> lags;
    std::vector<unsigned char> inside;  // per x row: row lies in the allowed region

    explicit BoundaryKernel(PhaseGrid g)
        : grid(g), values(g.size(), 0.0), lags(g.n_x() * lag_count_for(g), 0.0), inside(g.n_x(), 0) {}

    static std::size_t lag_count_for(const PhaseGrid& g) noexcept { return 2 * g.n_p() - 1; }
    std::size_t lag_count() const noexcept { return lag_count_for(grid); }
    Axis lag_axis() const noexcept {
        return {-static_cast<double>(grid.n_p() - 1) * grid.dp(), grid.dp(), lag_count()};
    }

    double at(std::size_t i, std::size_t j) const noexcept { return values[i * grid.n_p() + j]; }
    std::span<const double> row(std::size_t i) const noexcept {
        return std::span<const double>(values).subspan(i * grid.n_p(), grid.n_p());
    }
    std::span<const double> lag_row(std::size_t i) const noexcept {
        return std::span<const double>(lags).subspan(i * lag_count(), lag_count());
    }
    WignerField as_field() const { return WignerField(grid, values); }
};

/// sin(width * p) / (pi p), with the p = 0 limit width / pi.
inline double sin_over_pi_p(double width, double p) noexcept {
    if (p == 0.0) return width / std::numbers::pi;
    return std::sin(width * p) / (std::numbers::pi * p);
}

/// Half-line kernel (2 (x - wall) / pi) sinc(2 (x - wall) p) for x > wall, 0 otherwise.
inline double halfline_profile(double x, double p, double wall = 0.0) noexcept {
    return x > wall ? sin_over_pi_p(2.0 * (x - wall), p) : 0.0;
}

/// Interval kernel sin(L(x) p) / (pi p) with L(x) = 2 min(x - a, b - x) inside (a, b).
inline double interval_profile(double x, double p, double a, double b) noexcept {
    if (!(x > a && x < b)) return 0.0;
    return sin_over_pi_p(2.0 * std::min(x - a, b - x), p);
}

namespace detail {

template <class Profile>
BoundaryKernel tabulate_kernel(const PhaseGrid& grid, KernelProvenance prov, std::string geometry,
                               Profile&& profile) {
    BoundaryKernel k(grid);
    k.provenance = prov;
    k.geometry = std::move(geometry);
    const Axis lag = k.lag_axis();
    for (std::size_t i = 0; i < grid.n_x(); ++i) {
        const double x = grid.x(i);
        for (std::size_t j = 0; j < grid.n_p(); ++j) k.values[i * grid.n_p() + j] = profile(x, grid.p(j));
        for (std::size_t q = 0; q < lag.count; ++q) k.lags[i * lag.count + q] = profile(x, lag.at(q));
        k.inside[i] = profile(x, 0.0) != 0.0;
    }
    return k;
}

inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline BoundaryKernel halfline_kernel(const PhaseGrid& grid, double wall = 0.0) {
    return detail::tabulate_kernel(grid, KernelProvenance::AnalyticHalfline, "wall=" + detail::format_number(wall),
                                   [wall](double x, double p) { return halfline_profile(x, p, wall); });
}

inline BoundaryKernel interval_kernel(const PhaseGrid& grid, double a, double b) {
    require(a < b, ErrorKind::BadInterval, "interval requires a < b");
    require(a >= grid.x_min() && b <= grid.x_max() + 1e-12 * std::abs(grid.x_max()), ErrorKind::InvalidArgument,
            "interval must lie inside the grid's x window");
    return detail::tabulate_kernel(grid, KernelProvenance::AnalyticInterval,
                                   "a=" + detail::format_number(a) + " b=" + detail::format_number(b),
                                   [a, b](double x, double p) { return interval_profile(x, p, a, b); });
}

/// Transform of a sampled indicator over y, one row of the kernel.
///
/// Sample k owns the y cell of width dy centred at y_k = (k - (N-1)/2) dy, and
/// the transform is that of the piecewise-constant function this defines:
///
///   K(p) = (1/2pi) dy sinc(p dy / 2) sum_k g_k exp(i p y_k)
///
/// When the indicator's jumps fall on cell edges this is the exact transform
/// of the indicator. The slice must be even in y.
inline std::vector<double> numeric_kernel(std::span<const double> g, double dy, const Axis& p) {
    const std::size_t n = g.size();
    require(dy > 0.0, ErrorKind::InvalidArgument, "numeric_kernel: dy must be positive");
    for (std::size_t k = 0; k < n; ++k)
        require(std::abs(g[k] - g[n - 1 - k]) <= 1e-12, ErrorKind::AsymmetricIndicator,
                "indicator slice is not even in y");
    std::vector<double> out(p.count, 0.0);
    if (n == 0) return out;
    std::vector<Complex> in(g.begin(), g.end());
    const double y0 = -0.5 * static_cast<double>(n - 1) * dy;
    const auto t = fft::chirp_z(in, y0, dy, p);
    double residue = 0.0, scale_max = 0.0;
    for (std::size_t j = 0; j < p.count; ++j) {
        const double half = 0.5 * p.at(j) * dy;
        const double hold = half == 0.0 ? 1.0 : std::sin(half) / half;
        const double scale = dy * hold / (2.0 * std::numbers::pi);
        out[j] = t[j].real() * scale;
        residue = std::max(residue, std::abs(t[j].imag() * scale));
        scale_max = std::max(scale_max, std::abs(out[j]));
    }
    require(residue < 1e-10 * std::max(1.0, scale_max), ErrorKind::RealnessViolation,
            "imaginary residue of an even indicator transform");
    return out;
}

/// 1-D level set: the allowed region is B(x) < 1.
using LevelSet1D = std::function<double(double)>;

/// Kernel built by sampling g(x, y) = [B(x - y/2) < 1][B(x + y/2) < 1] on
/// y cells of width dy (default 2 dx) and transforming each row numerically.
/// The y range covers x +- y/2 over the whole x window and one window beyond.
inline BoundaryKernel numeric_kernel_field(const PhaseGrid& grid, const LevelSet1D& level, std::string geometry,
                                           double dy = 0.0) {
    if (dy <= 0.0) dy = 2.0 * grid.dx();
    const double reach = 2.0 * (grid.x_max() - grid.x_min());
    const auto half_cells = static_cast<std::size_t>(std::ceil(reach / dy));
    const std::size_t cells = 2 * half_cells;

    BoundaryKernel k(grid);
    k.provenance = KernelProvenance::Numeric;
    k.geometry = std::move(geometry);
    const Axis lag = k.lag_axis();
    parallel_for(grid.n_x(), [&](std::size_t i) {
        const double x = grid.x(i);
        std::vector<double> g(cells);
        for (std::size_t c = 0; c < cells; ++c) {
            const double y = static_cast<double>(2 * static_cast<long long>(c) - static_cast<long long>(cells - 1)) *
                             (0.5 * dy);
            g[c] = (level(x - 0.5 * y) < 1.0 && level(x + 0.5 * y) < 1.0) ? 1.0 : 0.0;
        }
        const auto on_grid = numeric_kernel(g, dy, grid.p_axis());
        const auto on_lags = numeric_kernel(g, dy, lag);
        std::copy(on_grid.begin(), on_grid.end(), k.values.begin() + static_cast<std::ptrdiff_t>(i * grid.n_p()));
        std::copy(on_lags.begin(), on_lags.end(), k.lags.begin() + static_cast<std::ptrdiff_t>(i * lag.count));
        k.inside[i] = level(x) < 1.0;
    });
    return k;
}

/// 1 - sum over lags of K dp for rows inside the allowed region, 0 elsewhere:
/// the part of the unit kernel mass that falls outside the lag window.
inline std::vector<double> kernel_tail_mass(const BoundaryKernel& k) {
    std::vector<double> out(k.grid.n_x(), 0.0);
    for (std::size_t i = 0; i < k.grid.n_x(); ++i) {
        if (!k.inside[i]) continue;
        double s = 0.0;
        for (double v : k.lag_row(i)) s += v;
        out[i] = 1.0 - s * k.grid.dp();
    }
    return out;
}

// ---------------------------------------------------------------------------
// n-dimensional billiards

/// n-D level set: the allowed region is B(x_1, ..., x_n) < 1.
using LevelSet = std::function<double(std::span<const double>)>;

/// Odd-count axes include y = 0; even-count axes are cell-centred about it.
inline Axis symmetric_axis(double step, std::size_t count) {
    return {-0.5 * static_cast<double>(count - 1) * step, step, count};
}

namespace detail {

// y_k computed from an integer offset so that y_{N-1-k} == -y_k bit for bit.
inline double symmetric_coord(const Axis& a, std::size_t k) noexcept {
    return static_cast<double>(2 * static_cast<long long>(k) - static_cast<long long>(a.count - 1)) *
           (0.5 * a.step);
}

inline std::size_t product(const std::vector<Axis>& axes) noexcept {
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.count;
    return n;
}

// Row-major multi-index of a flat index.
inline void unflatten(std::size_t flat, const std::vector<Axis>& axes, std::vector<std::size_t>& idx) {
    idx.resize(axes.size());
    for (std::size_t d = axes.size(); d-- > 0;) {
        idx[d] = flat % axes[d].count;
        flat /= axes[d].count;
    }
}

}  // namespace detail

/// Sampled g(x, y) = [B(x - y/2) < 1][B(x + y/2) < 1] over the product of the
/// x grid and the symmetric y grid. Flattened x-major, each block row-major.
struct ShapeIndicator {
    std::vector<Axis> x_axes;
    std::vector<Axis> y_axes;
    std::vector<unsigned char> g;

    std::size_t dimension() const noexcept { return x_axes.size(); }
    std::size_t x_points() const noexcept { return detail::product(x_axes); }
    std::size_t y_points() const noexcept { return detail::product(y_axes); }
    bool at(std::size_t x_flat, std::size_t y_flat) const noexcept { return g[x_flat * y_points() + y_flat] != 0; }
    std::span<const unsigned char> slice(std::size_t x_flat) const noexcept {
        return std::span<const unsigned char>(g).subspan(x_flat * y_points(), y_points());
    }
};

inline ShapeIndicator billiard_indicator(const LevelSet& level, std::vector<Axis> x_axes, std::vector<Axis> y_axes) {
    require(!x_axes.empty() && x_axes.size() == y_axes.size(), ErrorKind::InvalidArgument,
            "billiard_indicator: need one x axis and one y axis per dimension");
    for (const auto& y : y_axes)
        require(y.count > 0 && std::abs(y.start + 0.5 * static_cast<double>(y.count - 1) * y.step) <= 1e-12 * y.step,
                ErrorKind::InvalidArgument, "billiard_indicator: y axes must be symmetric about 0");

    ShapeIndicator s{std::move(x_axes), std::move(y_axes), {}};
    const std::size_t nx = s.x_points(), ny = s.y_points(), dim = s.dimension();
    s.g.assign(nx * ny, 0);

    bool any_inside = false;
    std::vector<std::size_t> xi, yi;
    std::vector<double> x(dim), lo(dim), hi(dim);
    for (std::size_t a = 0; a < nx; ++a) {
        detail::unflatten(a, s.x_axes, xi);
        for (std::size_t d = 0; d < dim; ++d) x[d] = s.x_axes[d].at(xi[d]);
        any_inside = any_inside || level(x) < 1.0;
        for (std::size_t b = 0; b < ny; ++b) {
            detail::unflatten(b, s.y_axes, yi);
            for (std::size_t d = 0; d < dim; ++d) {
                const double y = detail::symmetric_coord(s.y_axes[d], yi[d]);
                lo[d] = x[d] - 0.5 * y;
                hi[d] = x[d] + 0.5 * y;
            }
            s.g[a * ny + b] = (level(lo) < 1.0 && level(hi) < 1.0) ? 1 : 0;
        }
    }
    require(any_inside, ErrorKind::EmptyInterior, "no x grid point lies inside the billiard");
    return s;
}

/// K(x, p) over x points and a momentum product grid, flattened like ShapeIndicator.
struct NdKernel {
    std::vector<Axis> x_axes;
    std::vector<Axis> p_axes;
    std::vector<double> values;

    std::size_t x_points() const noexcept { return detail::product(x_axes); }
    std::size_t p_points() const noexcept { return detail::product(p_axes); }
    double at(std::size_t x_flat, std::size_t p_flat) const noexcept { return values[x_flat * p_points() + p_flat]; }
    std::span<const double> slice(std::size_t x_flat) const noexcept {
        return std::span<const double>(values).subspan(x_flat * p_points(), p_points());
    }
};

/// Per-x multidimensional transform of g over y, separable along each axis,
/// with the same cell convention as numeric_kernel in every dimension.
inline NdKernel kernel_from_indicator(const ShapeIndicator& s, std::vector<Axis> p_axes) {
    require(p_axes.size() == s.dimension(), ErrorKind::InvalidArgument,
            "kernel_from_indicator: need one momentum axis per dimension");
    NdKernel out{s.x_axes, std::move(p_axes), {}};
    const std::size_t dim = s.dimension();
    const std::size_t np = out.p_points();
    out.values.assign(s.x_points() * np, 0.0);

    parallel_for(s.x_points(), [&](std::size_t a) {
        const auto g = s.slice(a);
        for (std::size_t k = 0; k < g.size(); ++k)
            require(g[k] == g[g.size() - 1 - k], ErrorKind::AsymmetricIndicator, "indicator is not even in y");

        // Transform one axis at a time; shape[d] switches from y count to p count.
        std::vector<std::size_t> shape(dim);
        for (std::size_t d = 0; d < dim; ++d) shape[d] = s.y_axes[d].count;
        std::vector<Complex> data(g.begin(), g.end());
        for (std::size_t d = 0; d < dim; ++d) {
            const Axis& ya = s.y_axes[d];
            const Axis& pa = out.p_axes[d];
            std::size_t inner = 1, outer = 1;
            for (std::size_t e = d + 1; e < dim; ++e) inner *= shape[e];
            for (std::size_t e = 0; e < d; ++e) outer *= shape[e];
            std::vector<Complex> next(outer * pa.count * inner);
            std::vector<Complex> line(ya.count);
            for (std::size_t o = 0; o < outer; ++o)
                for (std::size_t in = 0; in < inner; ++in) {
                    for (std::size_t k = 0; k < ya.count; ++k) line[k] = data[(o * ya.count + k) * inner + in];
                    const auto t = fft::chirp_z(line, detail::symmetric_coord(ya, 0), ya.step, pa);
                    for (std::size_t j = 0; j < pa.count; ++j) {
                        const double half = 0.5 * pa.at(j) * ya.step;
                        const double hold = half == 0.0 ? 1.0 : std::sin(half) / half;
                        next[(o * pa.count + j) * inner + in] = t[j] * (ya.step * hold / (2.0 * std::numbers::pi));
                    }
                }
            data = std::move(next);
            shape[d] = pa.count;
        }
        for (std::size_t j = 0; j < np; ++j) out.values[a * np + j] = data[j].real();
    });
    return out;
}

/// B = |x|^2 / R^2: the disk of radius R.
inline LevelSet disk_level_set(double radius) {
    require(radius > 0.0, ErrorKind::InvalidArgument, "disk radius must be positive");
    return [radius](std::span<const double> x) {
        double r2 = 0.0;
        for (double v : x) r2 += v * v;
        return r2 / (radius * radius);
    };
}

/// B = max_d |x_d - c_d| / h_d: the axis-aligned box [lo_d, hi_d].
inline LevelSet box_level_set(std::vector<double> lo, std::vector<double> hi) {
    require(lo.size() == hi.size() && !lo.empty(), ErrorKind::InvalidArgument, "box needs matching bounds");
    for (std::size_t d = 0; d < lo.size(); ++d) require(lo[d] < hi[d], ErrorKind::BadInterval, "box side requires lo < hi");
    return [lo = std::move(lo), hi = std::move(hi)](std::span<const double> x) {
        double b = 0.0;
        for (std::size_t d = 0; d < lo.size(); ++d)
            b = std::max(b, std::abs(x[d] - 0.5 * (lo[d] + hi[d])) / (0.5 * (hi[d] - lo[d])));
        return b;
    };
}

namespace detail {

inline void require_square_symmetric(const NdKernel& k) {
    require(k.p_axes.size() == 2 && k.p_axes[0] == k.p_axes[1], ErrorKind::InvalidArgument,
            "2-D symmetry checks need two identical momentum axes");
    const Axis& a = k.p_axes[0];
    require(a.count % 2 == 1 && a.node_of(0.0, 1e-9) == (a.count - 1) / 2, ErrorKind::InvalidArgument,
            "2-D symmetry checks need an odd momentum axis centred on 0");
}

}  // namespace detail

/// max over the square's symmetries (p1 <-> p2, sign flips) of
/// |K(x, S p) - K(x, p)|, relative to max |K(x, .)|. A pixelated region
/// symmetric under those operations gives round-off only.
inline double square_symmetry_defect(const NdKernel& k, std::size_t x_flat) {
    detail::require_square_symmetric(k);
    const std::size_t n = k.p_axes[0].count;
    const auto v = k.slice(x_flat);
    double peak = 0.0, d = 0.0;
    for (double u : v) peak = std::max(peak, std::abs(u));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double ref = v[i * n + j];
            const std::size_t fi = n - 1 - i, fj = n - 1 - j;
            for (double other : {v[j * n + i], v[fi * n + j], v[i * n + fj], v[fj * n + fi]})
                d = std::max(d, std::abs(other - ref));
        }
    return peak > 0.0 ? d / peak : 0.0;
}

/// Largest spread of K(x, p) among lattice momenta of equal length (for
/// example (5, 0) and (3, 4) in units of dp), relative to max |K(x, .)|.
/// Measures true rotational symmetry, including the pixelation of the region.
inline double ring_anisotropy(const NdKernel& k, std::size_t x_flat) {
    detail::require_square_symmetric(k);
    const std::size_t n = k.p_axes[0].count;
    const long long c = static_cast<long long>((n - 1) / 2);
    const auto v = k.slice(x_flat);
    double peak = 0.0;
    for (double u : v) peak = std::max(peak, std::abs(u));
    std::vector<double> lo(static_cast<std::size_t>(2 * c * c + 1), std::numeric_limits<double>::infinity());
    std::vector<double> hi(lo.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const long long a = static_cast<long long>(i) - c, b = static_cast<long long>(j) - c;
            const auto r2 = static_cast<std::size_t>(a * a + b * b);
            if (r2 > static_cast<std::size_t>(c * c)) continue;  // full rings only
            lo[r2] = std::min(lo[r2], v[i * n + j]);
            hi[r2] = std::max(hi[r2], v[i * n + j]);
        }
    double d = 0.0;
    for (std::size_t r = 0; r < lo.size(); ++r)
        if (hi[r] >= lo[r]) d = std::max(d, hi[r] - lo[r]);
    return peak > 0.0 ? d / peak : 0.0;
}

}  // namespace wigwall
