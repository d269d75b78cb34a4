#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "wigwall/phase_grid.hpp"
#include "wigwall/wigner_transform.hpp"

namespace wigwall {

/// Free Gaussian packet; sigma is the position standard deviation of |psi|^2 at t = 0.
struct GaussianPacket {
    double x0 = 0.0;
    double p0 = 0.0;
    double sigma = 1.0;
    double m = 1.0;

    void validate() const {
        require(std::isfinite(x0) && std::isfinite(p0), ErrorKind::InvalidArgument, "packet centre must be finite");
        require(std::isfinite(sigma) && sigma > 0.0, ErrorKind::InvalidArgument, "packet sigma must be positive");
        require(std::isfinite(m) && m > 0.0, ErrorKind::InvalidArgument, "packet mass must be positive");
    }

    /// Position standard deviation at time t.
    double width(double t) const noexcept {
        const double s = t / (2.0 * m * sigma);
        return std::sqrt(sigma * sigma + s * s);
    }
    double centre(double t) const noexcept { return x0 + p0 * t / m; }

    /// Probability mass of |psi(t)|^2 below x.
    double mass_below(double x, double t) const noexcept {
        return 0.5 * std::erfc(-(x - centre(t)) / (std::numbers::sqrt2 * width(t)));
    }
};

/// psi(x, t) for i psi_t = -psi_xx / (2m), hbar = 1.
inline Complex free_gaussian_value(const GaussianPacket& g, double t, double x) {
    const Complex one_it(1.0, t / (2.0 * g.m * g.sigma * g.sigma));
    const double u = x - g.centre(t);
    const Complex arg = -u * u / (4.0 * g.sigma * g.sigma * one_it) + Complex(0.0, g.p0 * (x - g.x0)) -
                        Complex(0.0, g.p0 * g.p0 * t / (2.0 * g.m));
    return std::pow(2.0 * std::numbers::pi * g.sigma * g.sigma, -0.25) / std::sqrt(one_it) * std::exp(arg);
}

namespace detail {

inline void require_covered(const GaussianPacket& g, double t, const Axis& axis, double lo_limit) {
    const double lost = (g.mass_below(axis.start, t) - g.mass_below(lo_limit, t)) +
                        (1.0 - g.mass_below(axis.last(), t));
    require(lost <= 1e-9, ErrorKind::SupportEscaped,
            "packet mass outside the sampling axis: " + std::to_string(lost));
}

}  // namespace detail

inline ComplexWave free_gaussian(const GaussianPacket& g, double t, const Axis& axis) {
    g.validate();
    detail::require_covered(g, t, axis, -std::numeric_limits<double>::infinity());
    std::vector<Complex> v(axis.count);
    for (std::size_t k = 0; k < axis.count; ++k) v[k] = free_gaussian_value(g, t, axis.at(k));
    return ComplexWave(axis, std::move(v));
}

/// Image solution [phi(x, t) - phi(2 wall - x, t)] theta(x - wall) with phi the free packet.
inline Complex images_value(const GaussianPacket& g, double t, double x, double wall = 0.0) {
    if (!(x > wall)) return {};
    return free_gaussian_value(g, t, x) - free_gaussian_value(g, t, 2.0 * wall - x);
}

inline void require_inside_halfline(const GaussianPacket& g, double wall = 0.0) {
    require(g.mass_below(wall, 0.0) < 1e-8, ErrorKind::InvalidArgument,
            "packet overlaps the wall at t = 0");
}

inline ComplexWave images_reflect(const GaussianPacket& g, double t, const Axis& axis, double wall = 0.0) {
    g.validate();
    require_inside_halfline(g, wall);
    // The image packet mirrors phi; both must stay on the axis once folded to x > wall.
    const double reach = std::max(std::abs(axis.start - wall), std::abs(axis.last() - wall));
    const double far = wall + reach;
    const double lost = 1.0 - g.mass_below(far, t) + g.mass_below(2.0 * wall - far, t);
    require(lost <= 1e-9, ErrorKind::SupportEscaped, "packet or its image leaves the sampling axis");
    std::vector<Complex> v(axis.count);
    for (std::size_t k = 0; k < axis.count; ++k) v[k] = images_value(g, t, axis.at(k), wall);
    return ComplexWave(axis, std::move(v));
}

/// Infinite-well state sum_n c_n sin(n pi (x - a) / L), n = 1..N.
struct BoxSpectrum {
    double a = 0.0;
    double b = 1.0;
    double m = 1.0;
    std::vector<Complex> coeffs;  // coeffs[n - 1]
    double truncation_error = 0.0;

    double length() const noexcept { return b - a; }
    std::size_t n_max() const noexcept { return coeffs.size(); }
    double energy(std::size_t n) const noexcept {
        const double k = static_cast<double>(n) * std::numbers::pi / length();
        return k * k / (2.0 * m);
    }
    /// sum |c_n|^2 L / 2
    double norm2() const noexcept {
        double s = 0.0;
        for (const Complex& c : coeffs) s += std::norm(c);
        return s * length() / 2.0;
    }
    Complex value(double x, double t) const {
        if (!(x > a && x < b)) return {};
        Complex s{};
        for (std::size_t n = 1; n <= coeffs.size(); ++n)
            s += coeffs[n - 1] * std::sin(static_cast<double>(n) * std::numbers::pi * (x - a) / length()) *
                 std::polar(1.0, -energy(n) * t);
        return s;
    }
};

/// Unit-norm eigenmode n of the well.
inline BoxSpectrum box_mode(double a, double b, double m, std::size_t n) {
    require(a < b, ErrorKind::BadInterval, "interval requires a < b");
    require(n >= 1, ErrorKind::InvalidArgument, "mode index starts at 1");
    BoxSpectrum s{a, b, m, std::vector<Complex>(n, 0.0), 0.0};
    s.coeffs[n - 1] = std::sqrt(2.0 / (b - a));
    return s;
}

/// Coefficients of a unit-norm state supported in (a, b) by trapezoid
/// quadrature on `samples` cells. Throws TruncationTooSevere when the
/// discarded norm sqrt(1 - sum |c_n|^2 L/2) exceeds 1e-6; otherwise the kept
/// coefficients are rescaled to unit norm.
inline BoxSpectrum project_to_box(const std::function<Complex(double)>& psi, double a, double b, double m,
                                  std::size_t n_max, std::size_t samples = 8192) {
    require(a < b, ErrorKind::BadInterval, "interval requires a < b");
    require(m > 0.0, ErrorKind::InvalidArgument, "mass must be positive");
    require(n_max >= 1 && samples >= 2, ErrorKind::InvalidArgument, "projection needs modes and samples");
    const double len = b - a;
    const double h = len / static_cast<double>(samples);
    std::vector<Complex> f(samples + 1);
    double norm = 0.0;
    for (std::size_t k = 0; k <= samples; ++k) {
        f[k] = (k == 0 || k == samples) ? Complex{} : psi(a + static_cast<double>(k) * h);
        norm += std::norm(f[k]) * h;
    }
    BoxSpectrum s{a, b, m, std::vector<Complex>(n_max), 0.0};
    for (std::size_t n = 1; n <= n_max; ++n) {
        Complex acc{};
        const double kn = static_cast<double>(n) * std::numbers::pi / samples;
        for (std::size_t k = 1; k < samples; ++k) acc += f[k] * std::sin(kn * static_cast<double>(k));
        s.coeffs[n - 1] = acc * h * 2.0 / len;
    }
    const double kept = s.norm2();
    s.truncation_error = std::sqrt(std::max(0.0, norm - kept) / norm);
    require(s.truncation_error <= 1e-6, ErrorKind::TruncationTooSevere,
            "box projection drops norm fraction " + std::to_string(s.truncation_error));
    const double scale = 1.0 / std::sqrt(kept);
    for (Complex& c : s.coeffs) c *= scale;
    return s;
}

inline BoxSpectrum project_gaussian_to_box(const GaussianPacket& g, double a, double b, std::size_t n_max) {
    g.validate();
    require(a < b, ErrorKind::BadInterval, "interval requires a < b");
    require(g.mass_below(a, 0.0) + (1.0 - g.mass_below(b, 0.0)) < 1e-8, ErrorKind::InvalidArgument,
            "packet overlaps the walls");
    return project_to_box([&g](double x) { return free_gaussian_value(g, 0.0, x); }, a, b, g.m, n_max);
}

inline ComplexWave box_evolve(const BoxSpectrum& s, double t, const Axis& axis) {
    std::vector<Complex> v(axis.count);
    for (std::size_t k = 0; k < axis.count; ++k) v[k] = s.value(axis.at(k), t);
    return ComplexWave(axis, std::move(v));
}

/// |<a|b>| over a shared axis (rectangle rule).
inline double fidelity(const ComplexWave& a, const ComplexWave& b) {
    require(a.axis == b.axis, ErrorKind::GridMismatch, "fidelity: axes differ");
    Complex s{};
    for (std::size_t k = 0; k < a.samples.size(); ++k) s += std::conj(a.samples[k]) * b.samples[k];
    return std::abs(s) * a.axis.step;
}

struct FieldComparison {
    double l2_rel = 0.0;
    double max_abs = 0.0;
    double mass_diff = 0.0;
};

/// Distances of a from the reference b: ||a - b|| / ||b||, max |a - b| and
/// |mass(a) - mass(b)|.
inline FieldComparison compare_fields(const WignerField& a, const WignerField& b) {
    require_same_grid(a.grid(), b.grid(), "compare_fields");
    double diff2 = 0.0, ref2 = 0.0, mx = 0.0;
    const auto va = a.values();
    const auto vb = b.values();
    for (std::size_t k = 0; k < va.size(); ++k) {
        const double d = va[k] - vb[k];
        diff2 += d * d;
        ref2 += vb[k] * vb[k];
        mx = std::max(mx, std::abs(d));
    }
    FieldComparison c;
    c.l2_rel = ref2 > 0.0 ? std::sqrt(diff2 / ref2) : std::sqrt(diff2);
    c.max_abs = mx;
    c.mass_diff = std::abs(total_mass(a) - total_mass(b));
    return c;
}

/// Axis with spacing dx / factor through every grid x node, covering the x window.
inline Axis refined_axis(const PhaseGrid& grid, std::size_t factor) {
    require(factor >= 1, ErrorKind::InvalidArgument, "refinement factor must be positive");
    return {grid.x_min(), grid.dx() / static_cast<double>(factor), (grid.n_x() - 1) * factor + 1};
}

/// Wigner function of an oracle wavefunction sampled on a refined axis. The
/// y quadrature error of a state with kinks (hard walls) is O(dy^2); with
/// `extrapolate` the transforms at factors f and 2f are combined as
/// (4 W(2f) - W(f)) / 3.
inline WignerField oracle_wigner(const std::function<Complex(double)>& psi, const PhaseGrid& grid,
                                 std::size_t factor, bool extrapolate = true) {
    auto sample = [&](std::size_t f) {
        const Axis ax = refined_axis(grid, f);
        std::vector<Complex> v(ax.count);
        for (std::size_t k = 0; k < ax.count; ++k) v[k] = psi(ax.at(k));
        return wigner_of(ComplexWave(ax, std::move(v)), grid);
    };
    if (!extrapolate) return sample(factor);
    WignerField fine = sample(2 * factor);
    const WignerField coarse = sample(factor);
    fine *= 4.0;
    fine -= coarse;
    fine *= 1.0 / 3.0;
    return fine;
}

}  // namespace wigwall
