#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "wigwall/fft.hpp"
#include "wigwall/parallel.hpp"
#include "wigwall/phase_grid.hpp"

namespace wigwall {

/// c(y) = psi*(x + y/2) psi(x - y/2) at a fixed x, on a symmetric y axis with
/// spacing twice the wavefunction spacing so that x +- y/2 are sample nodes.
/// With the exp(i p y) transform below, a packet carrying exp(i p0 x) peaks at
/// p = p0 and free motion is the shear x -> x + p t / m.
struct CorrelationSlice {
    double x = 0.0;
    double dy = 0.0;
    std::vector<Complex> values;  // values[k] at y = (k - half()) * dy

    std::size_t half() const noexcept { return values.empty() ? 0 : (values.size() - 1) / 2; }
    double y(std::size_t k) const noexcept {
        return (static_cast<double>(k) - static_cast<double>(half())) * dy;
    }

    /// max |c(-y) - conj(c(y))|; zero for any slice built from a wavefunction.
    double hermitian_defect() const noexcept {
        double d = 0.0;
        const std::size_t n = values.size();
        for (std::size_t k = 0; k < n; ++k) d = std::max(d, std::abs(values[n - 1 - k] - std::conj(values[k])));
        return d;
    }
};

inline CorrelationSlice correlation_slice(const ComplexWave& psi, std::size_t node) {
    require(node < psi.samples.size(), ErrorKind::InvalidArgument, "correlation_slice: node out of range");
    const std::size_t reach = std::min(node, psi.samples.size() - 1 - node);
    CorrelationSlice s;
    s.x = psi.axis.at(node);
    s.dy = 2.0 * psi.axis.step;
    s.values.resize(2 * reach + 1);
    for (std::size_t k = 0; k <= 2 * reach; ++k) {
        const std::size_t lo = node + reach - k;  // x - y/2
        const std::size_t hi = node - reach + k;  // x + y/2
        s.values[k] = std::conj(psi.samples[hi]) * psi.samples[lo];
    }
    return s;
}

/// (1/2pi) sum_k exp(i p y_k) c(y_k) dy at every p of the axis, via chirp-z.
inline std::vector<Complex> transform_slice(const CorrelationSlice& s, const Axis& p) {
    auto out = fft::chirp_z(s.values, s.y(0), s.dy, p);
    const double scale = s.dy / (2.0 * std::numbers::pi);
    for (Complex& v : out) v *= scale;
    return out;
}

/// Reference path for transform_slice: the same sum, term by term.
inline std::vector<Complex> transform_slice_direct(const CorrelationSlice& s, const Axis& p) {
    std::vector<Complex> out(p.count);
    for (std::size_t j = 0; j < p.count; ++j) {
        Complex acc = 0.0;
        for (std::size_t k = 0; k < s.values.size(); ++k) acc += std::polar(1.0, p.at(j) * s.y(k)) * s.values[k];
        out[j] = acc * (s.dy / (2.0 * std::numbers::pi));
    }
    return out;
}

struct WignerOptions {
    /// Reject states with |psi|^2 in the outermost two samples above 1e-6 of the norm.
    /// Image-extended periodic states switch this off.
    bool check_domain = true;
    /// Largest tolerated imaginary part of the raw transform.
    double max_imag = 1e-10;
    /// Use the term-by-term sum instead of chirp-z.
    bool direct = false;
    /// If positive, every correlation is multiplied by a window that is 1 for
    /// |y| <= y_taper / 2 and falls to 0 at |y| = y_taper along a raised cosine.
    /// States that never decay (periodic image extensions) need this so that
    /// every row sees the same finite correlation length.
    double y_taper = 0.0;
};

inline double taper_weight(double y, double width) noexcept {
    const double a = std::abs(y), half = 0.5 * width;
    if (a <= half) return 1.0;
    if (a >= width) return 0.0;
    return 0.5 * (1.0 + std::cos(std::numbers::pi * (a - half) / half));
}

namespace detail {

inline void check_wigner_inputs(const ComplexWave& psi, const PhaseGrid& grid, const WignerOptions& opt,
                                std::vector<std::size_t>& nodes) {
    require(psi.samples.size() >= 2, ErrorKind::InvalidArgument, "wigner_of: wavefunction needs samples");
    nodes.resize(grid.n_x());
    for (std::size_t i = 0; i < grid.n_x(); ++i) {
        auto node = psi.axis.node_of(grid.x(i), 1e-6);
        require(node.has_value(), ErrorKind::InvalidArgument,
                "wigner_of: grid x nodes must coincide with wavefunction samples");
        nodes[i] = *node;
    }
    const double dy = 2.0 * psi.axis.step;
    const double pmax = std::max(std::abs(grid.p_min()), std::abs(grid.p_max()));
    require(pmax * dy < std::numbers::pi, ErrorKind::NyquistViolation,
            "momentum window exceeds the band representable with dy = 2*dx (|p|max*dy must be < pi)");
    if (opt.check_domain) {
        const std::size_t n = psi.samples.size();
        double total = 0.0, edge = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double a = std::norm(psi.samples[k]);
            total += a;
            if (k < 2 || k + 2 >= n) edge += a;
        }
        require(edge <= 1e-6 * total, ErrorKind::DomainTooSmall,
                "wavefunction support reaches the ends of its axis");
    }
}

inline std::pair<WignerField, double> wigner_raw(const ComplexWave& psi, const PhaseGrid& grid,
                                                 const WignerOptions& opt) {
    std::vector<std::size_t> nodes;
    check_wigner_inputs(psi, grid, opt, nodes);
    WignerField w(grid);
    std::vector<double> residue(grid.n_x(), 0.0);
    const Axis p = grid.p_axis();
    parallel_for(grid.n_x(), [&](std::size_t i) {
        auto slice = correlation_slice(psi, nodes[i]);
        if (opt.y_taper > 0.0)
            for (std::size_t k = 0; k < slice.values.size(); ++k) slice.values[k] *= taper_weight(slice.y(k), opt.y_taper);
        const auto t = opt.direct ? transform_slice_direct(slice, p) : transform_slice(slice, p);
        auto row = w.row(i);
        double r = 0.0;
        for (std::size_t j = 0; j < t.size(); ++j) {
            row[j] = t[j].real();
            r = std::max(r, std::abs(t[j].imag()));
        }
        residue[i] = r;
    });
    return {std::move(w), *std::max_element(residue.begin(), residue.end())};
}

}  // namespace detail

/// W(x, p) = (1/2pi) * integral exp(i p y) psi*(x + y/2) psi(x - y/2) dy on the grid.
///
/// Every grid x node must be a sample of psi; the y sum runs over all offsets
/// for which both factors are on the psi axis. A finer psi axis than the grid
/// refines the y quadrature.
inline WignerField wigner_of(const ComplexWave& psi, const PhaseGrid& grid, const WignerOptions& opt = {}) {
    auto [w, residue] = detail::wigner_raw(psi, grid, opt);
    require(residue < opt.max_imag, ErrorKind::RealnessViolation,
            "imaginary residue " + std::to_string(residue) + " of the Wigner transform");
    return std::move(w);
}

/// Largest imaginary part of the raw transform, before it is discarded.
inline double wigner_realness_check(const ComplexWave& psi, const PhaseGrid& grid, WignerOptions opt = {}) {
    opt.max_imag = std::numeric_limits<double>::infinity();
    return detail::wigner_raw(psi, grid, opt).second;
}

}  // namespace wigwall
