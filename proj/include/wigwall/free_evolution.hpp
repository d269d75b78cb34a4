#pragma once

#include <cmath>
#include <vector>

#include "wigwall/fft.hpp"
#include "wigwall/parallel.hpp"
#include "wigwall/phase_grid.hpp"

namespace wigwall {

/// Free-particle evolution time and mass; negative t runs backwards.
struct ShearParams {
    double t = 0.0;
    double m = 1.0;

    ShearParams() = default;
    ShearParams(double time, double mass) : t(time), m(mass) {
        require(std::isfinite(time), ErrorKind::InvalidArgument, "shear time must be finite");
        require(std::isfinite(mass) && mass > 0.0, ErrorKind::InvalidArgument, "mass must be positive");
    }
};

enum class ShiftScheme {
    Automatic,  ///< Fourier unless the input touches the x edges, then cubic
    Fourier,    ///< exact for band-limited rows, periodic in the window
    Cubic,      ///< Keys cubic convolution, zero fill outside the window
};

struct ShearOptions {
    ShiftScheme scheme = ShiftScheme::Automatic;
    /// Throw SupportEscaped when the sheared field's x-edge mass exceeds 1e-4.
    bool check_support = true;
};

/// Per-row error of the Fourier shift on fields that pass the edge-mass checks,
/// relative to max|W|. Composition tests allow twice this.
inline constexpr double kFourierShiftTolerance = 1e-9;

namespace detail {

inline void fourier_shift(std::span<double> row, double shift, double h) {
    const std::size_t n = row.size();
    std::vector<Complex> buf(row.begin(), row.end());
    fft::transform(buf, fft::Direction::Forward);
    const auto k = fft::wavenumbers(n, h);
    for (std::size_t i = 0; i < n; ++i) {
        if (n % 2 == 0 && i == n / 2)
            buf[i] *= std::cos(k[i] * shift);  // Nyquist bin stays real
        else
            buf[i] *= std::polar(1.0, -k[i] * shift);
    }
    fft::transform(buf, fft::Direction::Backward);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) row[i] = buf[i].real() * scale;
}

inline double keys_weight(double s) {
    s = std::abs(s);
    if (s < 1.0) return (1.5 * s - 2.5) * s * s + 1.0;
    if (s < 2.0) return ((-0.5 * s + 2.5) * s - 4.0) * s + 2.0;
    return 0.0;
}

inline void cubic_shift(std::span<double> row, double shift, double h) {
    const std::size_t n = row.size();
    std::vector<double> src(row.begin(), row.end());
    const double cells = shift / h;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = static_cast<double>(i) - cells;  // fractional source index
        const double base = std::floor(u);
        double acc = 0.0;
        for (int o = -1; o <= 2; ++o) {
            const double idx = base + o;
            if (idx < 0.0 || idx >= static_cast<double>(n)) continue;
            acc += src[static_cast<std::size_t>(idx)] * keys_weight(u - idx);
        }
        row[i] = acc;
    }
}

}  // namespace detail

/// W(x, p, t) = W(x - p t / m, p, 0): each momentum row translated by p t / m.
inline WignerField shear_evolve(const WignerField& w0, const ShearParams& s, const ShearOptions& opt = {}) {
    if (s.t == 0.0) return w0;
    const auto& g = w0.grid();
    ShiftScheme scheme = opt.scheme;
    if (scheme == ShiftScheme::Automatic)
        scheme = edge_mass_fraction_x(w0) > 1e-6 ? ShiftScheme::Cubic : ShiftScheme::Fourier;

    WignerField out(g);
    parallel_for(g.n_p(), [&](std::size_t j) {
        std::vector<double> row(g.n_x());
        for (std::size_t i = 0; i < g.n_x(); ++i) row[i] = w0.at(i, j);
        const double shift = g.p(j) * s.t / s.m;
        if (scheme == ShiftScheme::Fourier)
            detail::fourier_shift(row, shift, g.dx());
        else
            detail::cubic_shift(row, shift, g.dx());
        for (std::size_t i = 0; i < g.n_x(); ++i) out.at(i, j) = row[i];
    });

    if (opt.check_support) {
        const double edge = edge_mass_fraction_x(out);
        require(edge <= 1e-4, ErrorKind::SupportEscaped,
                "sheared field left the x window (edge mass fraction " + std::to_string(edge) + ")");
    }
    return out;
}

/// W(x, p, 0) * theta(x - wall), then the free shear. The result vanishes for
/// x <= wall + p t / m rather than x <= wall: it violates the hard wall.
/// The mask leaves a jump at the wall, so the automatic scheme uses the local
/// cubic shift instead of the ringing Fourier one.
inline WignerField naive_bounded_evolve(const WignerField& w0, const ShearParams& s, double wall = 0.0,
                                        ShearOptions opt = {}) {
    if (opt.scheme == ShiftScheme::Automatic) opt.scheme = ShiftScheme::Cubic;
    WignerField masked = w0;
    const auto& g = w0.grid();
    for (std::size_t i = 0; i < g.n_x(); ++i)
        if (!(g.x(i) > wall))
            for (double& v : masked.row(i)) v = 0.0;
    return shear_evolve(masked, s, opt);
}

/// sum over rows x <= wall of |W| dx dp: phase-space weight on the forbidden side.
inline double wall_violation_mass(const WignerField& w, double wall = 0.0) {
    const auto& g = w.grid();
    double s = 0.0;
    for (std::size_t i = 0; i < g.n_x(); ++i)
        if (!(g.x(i) > wall))
            for (double v : w.row(i)) s += std::abs(v);
    return s * g.dx() * g.dp();
}

}  // namespace wigwall
