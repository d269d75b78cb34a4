#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "wigwall/boundary_kernels.hpp"
#include "wigwall/fft.hpp"
#include "wigwall/free_evolution.hpp"
#include "wigwall/parallel.hpp"
#include "wigwall/phase_grid.hpp"
#include "wigwall/wigner_transform.hpp"

namespace wigwall {

enum class ConvolutionBackend { Direct, Fft };

/// Linear (zero-padded) momentum convolution with measure dp:
///
///   out[j] = sum_l w[l] * k[j - l + zero_lag] * dp
///
/// Kernel indices outside k contribute nothing. `k` is either a row on the same
/// momentum axis as `w` (zero_lag = index of p = 0) or a lag row of length
/// 2 |w| - 1 (zero_lag = |w| - 1).
inline std::vector<double> convolve_p(std::span<const double> w, std::span<const double> k, double dp,
                                      std::size_t zero_lag, ConvolutionBackend backend = ConvolutionBackend::Direct) {
    const std::size_t n = w.size();
    require(k.size() == n || (n > 0 && k.size() == 2 * n - 1), ErrorKind::LengthMismatch,
            "convolve_p: kernel row must match the field row or be its lag row");
    require(zero_lag < k.size(), ErrorKind::InvalidArgument, "convolve_p: zero lag outside the kernel row");
    std::vector<double> out(n, 0.0);
    if (backend == ConvolutionBackend::Fft) {
        const auto full = fft::linear_convolve(w, k);
        for (std::size_t j = 0; j < n; ++j) out[j] = full[j + zero_lag] * dp;
        return out;
    }
    const auto m = static_cast<long long>(k.size());
    for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t l = 0; l < n; ++l) {
            const long long idx = static_cast<long long>(j) - static_cast<long long>(l) + static_cast<long long>(zero_lag);
            if (idx >= 0 && idx < m) acc += w[l] * k[static_cast<std::size_t>(idx)];
        }
        out[j] = acc * dp;
    }
    return out;
}

enum class WallGeometry { Halfline, Interval, Custom };

/// Everything needed to evaluate the bounded field at any time: the free
/// Wigner function of the image-extended initial state and the wall kernel.
struct BoundedEvolutionPlan {
    BoundaryKernel kernel;
    WignerField initial;
    double mass = 1.0;
    ConvolutionBackend backend = ConvolutionBackend::Fft;
    WallGeometry geometry = WallGeometry::Custom;
    ShearOptions shear_options{};

    /// Assembles a plan from prepared parts. Half-line plans must have a
    /// point-symmetric initial field about (wall, 0).
    static BoundedEvolutionPlan from_parts(BoundaryKernel kernel, WignerField initial, double mass,
                                           ConvolutionBackend backend, WallGeometry geometry,
                                           ShearOptions shear = {}, double wall = 0.0);
};

/// max |W(2 wall - x, -p) - W(x, p)| over mirrored grid nodes that exist.
inline double point_reflection_defect(const WignerField& w, double wall = 0.0) {
    const auto& g = w.grid();
    const auto wall_node = g.x_axis().node_of(wall);
    const auto zero = g.zero_p_index();
    require(wall_node && zero, ErrorKind::InvalidArgument,
            "point_reflection_defect: wall and p = 0 must be grid nodes");
    double d = 0.0;
    for (std::size_t i = 0; i < g.n_x(); ++i) {
        const long long mi = 2 * static_cast<long long>(*wall_node) - static_cast<long long>(i);
        if (mi < 0 || mi >= static_cast<long long>(g.n_x())) continue;
        for (std::size_t j = 0; j < g.n_p(); ++j) {
            const long long mj = 2 * static_cast<long long>(*zero) - static_cast<long long>(j);
            if (mj < 0 || mj >= static_cast<long long>(g.n_p())) continue;
            d = std::max(d, std::abs(w.at(i, j) - w.at(static_cast<std::size_t>(mi), static_cast<std::size_t>(mj))));
        }
    }
    return d;
}

inline BoundedEvolutionPlan BoundedEvolutionPlan::from_parts(BoundaryKernel kernel, WignerField initial, double mass,
                                                             ConvolutionBackend backend, WallGeometry geometry,
                                                             ShearOptions shear, double wall) {
    require_same_grid(kernel.grid, initial.grid(), "BoundedEvolutionPlan");
    require(mass > 0.0, ErrorKind::InvalidArgument, "mass must be positive");
    if (geometry == WallGeometry::Halfline) {
        const double defect = point_reflection_defect(initial, wall);
        require(defect <= 1e-6, ErrorKind::InvalidArgument,
                "half-line plan needs the Wigner function of an odd state (point-reflection defect " +
                    std::to_string(defect) + ")");
    }
    return BoundedEvolutionPlan{std::move(kernel), std::move(initial), mass, backend, geometry, shear};
}

/// Odd continuation about the wall: Phi(x) = psi(x) for x > wall,
/// -psi(2 wall - x) for x < wall, 0 at the wall. The result lives on an axis
/// symmetric about the wall that contains every original node.
inline ComplexWave odd_extend(const ComplexWave& psi, double wall = 0.0) {
    const Axis& a = psi.axis;
    const double h = a.step;
    const double off = (wall - a.start) / h;
    require(std::abs(off - std::round(off)) < 1e-6, ErrorKind::InvalidArgument,
            "odd_extend: the wall must be a node of the wavefunction axis");
    const long long w = std::llround(off);
    const long long n = static_cast<long long>(a.count);
    const long long reach = std::max(std::abs(w), std::abs(n - 1 - w));
    Axis ext{wall - static_cast<double>(reach) * h, h, static_cast<std::size_t>(2 * reach + 1)};
    std::vector<Complex> v(ext.count);
    auto sample = [&](long long idx) -> Complex {
        return (idx >= 0 && idx < n) ? psi.samples[static_cast<std::size_t>(idx)] : Complex{};
    };
    for (long long k = 1; k <= reach; ++k) {
        v[static_cast<std::size_t>(reach + k)] = sample(w + k);
        v[static_cast<std::size_t>(reach - k)] = -sample(w + k);
    }
    return ComplexWave(ext, std::move(v));
}

/// Odd-periodic continuation of the part of psi inside (a, b): odd about every
/// image wall a + k L, period 2 L. Sampled on [a + k0 L, a + k1 L], the
/// smallest run of image walls covering `cover_min` to `cover_max`.
inline ComplexWave odd_periodic_extend(const ComplexWave& psi, double a, double b, double cover_min,
                                       double cover_max) {
    require(a < b, ErrorKind::BadInterval, "interval requires a < b");
    const Axis& ax = psi.axis;
    const double h = ax.step;
    const auto ia = ax.node_of(a, 1e-6);
    const auto ib = ax.node_of(b, 1e-6);
    require(ia && ib, ErrorKind::InvalidArgument, "odd_periodic_extend: walls must be wavefunction nodes");
    const long long cells = static_cast<long long>(*ib) - static_cast<long long>(*ia);  // L / h
    const double len = b - a;
    const double k0 = std::floor((cover_min - a) / len + 1e-9);
    const double k1 = std::ceil((cover_max - a) / len - 1e-9);
    const long long first = static_cast<long long>(k0) * cells;
    const long long last = static_cast<long long>(k1) * cells;
    Axis ext{a + static_cast<double>(first) * h, h, static_cast<std::size_t>(last - first + 1)};
    std::vector<Complex> v(ext.count);
    const long long period = 2 * cells;
    for (long long n = first; n <= last; ++n) {
        long long r = n % period;
        if (r < 0) r += period;
        Complex val{};
        if (r > 0 && r < cells)
            val = psi.samples[static_cast<std::size_t>(static_cast<long long>(*ia) + r)];
        else if (r > cells)
            val = -psi.samples[static_cast<std::size_t>(static_cast<long long>(*ia) + period - r)];
        v[static_cast<std::size_t>(n - first)] = val;
    }
    return ComplexWave(ext, std::move(v));
}

/// Plan for a hard wall at `wall` (allowed region x > wall). `state` is the
/// physical initial wavefunction; its odd extension feeds the free field.
inline BoundedEvolutionPlan make_halfline_plan(const ComplexWave& state, const PhaseGrid& grid, double mass,
                                               ConvolutionBackend backend = ConvolutionBackend::Fft,
                                               double wall = 0.0) {
    auto initial = wigner_of(odd_extend(state, wall), grid);
    return BoundedEvolutionPlan::from_parts(halfline_kernel(grid, wall), std::move(initial), mass, backend,
                                            WallGeometry::Halfline, ShearOptions{}, wall);
}

/// Plan for an infinite well on [a, b]. The free field is that of the
/// odd-periodic image extension, and the shear wraps periodically, so the
/// x window length n_x * dx must be a whole number of periods 2 (b - a).
///
/// The extension never decays, so its correlations are cut by a common taper
/// of full width Y = 0.75 (2 pi / dp - 2 (b - a)): wide enough that the
/// induced momentum blur (about 1 / Y, or t / (m Y) in x after the shear) is
/// small, narrow enough that the discrete momentum convolution stays free of
/// aliasing. The image lattice is sampled Y / 2 past each end of the window.
inline BoundedEvolutionPlan make_interval_plan(const ComplexWave& state, const PhaseGrid& grid, double a, double b,
                                               double mass, ConvolutionBackend backend = ConvolutionBackend::Fft) {
    require(a < b, ErrorKind::BadInterval, "interval requires a < b");
    const double len = b - a;
    const double periods = static_cast<double>(grid.n_x()) * grid.dx() / (2.0 * len);
    require(std::abs(periods - std::round(periods)) < 1e-9 && std::round(periods) >= 1.0,
            ErrorKind::InvalidArgument, "interval plan: the x window must span a whole number of periods 2(b - a)");
    WignerOptions wopt;
    wopt.check_domain = false;
    wopt.y_taper = 0.75 * (2.0 * std::numbers::pi / grid.dp() - 2.0 * len);
    require(wopt.y_taper >= 4.0 * len, ErrorKind::NyquistViolation,
            "interval plan: dp too coarse to resolve the well (need 2 pi / dp well above 2 (b - a))");
    const double margin = 0.5 * wopt.y_taper;
    const auto ext = odd_periodic_extend(state, a, b, grid.x_min() - margin, grid.x_max() + margin);
    auto initial = wigner_of(ext, grid, wopt);
    return BoundedEvolutionPlan::from_parts(interval_kernel(grid, a, b), std::move(initial), mass, backend,
                                            WallGeometry::Interval, ShearOptions{ShiftScheme::Fourier, false});
}

namespace detail {

inline void convolve_row_into(const BoundedEvolutionPlan& plan, const WignerField& sheared, std::size_t i,
                              std::span<double> dst) {
    if (!plan.kernel.inside[i]) {
        std::fill(dst.begin(), dst.end(), 0.0);
        return;
    }
    const auto& g = sheared.grid();
    const auto r = convolve_p(sheared.row(i), plan.kernel.lag_row(i), g.dp(), g.n_p() - 1, plan.backend);
    std::copy(r.begin(), r.end(), dst.begin());
}

}  // namespace detail

/// W(x, p, t) = W0(x - p t / m, p, 0) *_p K(x, p): the free shear followed by a
/// per-row momentum convolution with the wall kernel. Rows outside the allowed
/// region are exactly zero.
inline WignerField evolve_bounded(const BoundedEvolutionPlan& plan, double t) {
    const auto sheared = shear_evolve(plan.initial, ShearParams(t, plan.mass), plan.shear_options);
    WignerField out(sheared.grid());
    parallel_for(out.grid().n_x(), [&](std::size_t i) { detail::convolve_row_into(plan, sheared, i, out.row(i)); });
    return out;
}

/// max_p |W(x_probe, p, t) - theta W0(x_probe - p t / m, p, 0)| at the grid row
/// nearest x_probe; theta is the kernel's allowed-region mask.
inline double far_field_check(const BoundedEvolutionPlan& plan, double t, double x_probe) {
    const auto& g = plan.initial.grid();
    const double u = std::round((x_probe - g.x_min()) / g.dx());
    require(u >= 0.0 && u < static_cast<double>(g.n_x()), ErrorKind::InvalidArgument,
            "far_field_check: probe outside the grid");
    const auto i = static_cast<std::size_t>(u);
    const auto sheared = shear_evolve(plan.initial, ShearParams(t, plan.mass), plan.shear_options);
    std::vector<double> row(g.n_p());
    detail::convolve_row_into(plan, sheared, i, row);
    double dev = 0.0;
    for (std::size_t j = 0; j < g.n_p(); ++j) {
        const double free = plan.kernel.inside[i] ? sheared.at(i, j) : 0.0;
        dev = std::max(dev, std::abs(row[j] - free));
    }
    return dev;
}

/// Kernel tail mass weighted by where the field lives:
/// sum_i tail_i * rho_i / sum_i rho_i with rho_i = sum_j |W(x_i, p_j)|.
/// Bounds the fraction of the state's momentum mass the truncated kernel drops.
inline double weighted_tail_mass(const BoundaryKernel& kernel, const WignerField& w) {
    const auto tail = kernel_tail_mass(kernel);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < w.grid().n_x(); ++i) {
        double rho = 0.0;
        for (double v : w.row(i)) rho += std::abs(v);
        num += std::abs(tail[i]) * rho;
        den += rho;
    }
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace wigwall
