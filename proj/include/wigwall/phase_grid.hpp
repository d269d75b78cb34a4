#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wigwall/error.hpp"

namespace wigwall {

using Complex = std::complex<double>;

/// Uniformly spaced sample positions start + i*step, i in [0, count).
struct Axis {
    double start = 0.0;
    double step = 1.0;
    std::size_t count = 0;

    double at(std::size_t i) const noexcept { return start + static_cast<double>(i) * step; }
    double last() const noexcept { return at(count - 1); }

    /// Index of the node at coordinate v, if v lies on a node (to tol*step).
    std::optional<std::size_t> node_of(double v, double tol = 1e-9) const noexcept {
        const double r = (v - start) / step;
        const double k = std::round(r);
        if (std::abs(r - k) > tol || k < 0.0 || k >= static_cast<double>(count)) return std::nullopt;
        return static_cast<std::size_t>(k);
    }

    friend bool operator==(const Axis&, const Axis&) = default;
};

/// Uniform rectangular discretization of (x, p) phase space. Units: hbar = 1.
class PhaseGrid {
public:
    static PhaseGrid make(double x_min, double x_max, std::size_t n_x,
                          double p_min, double p_max, std::size_t n_p) {
        require(n_x >= 2 && n_p >= 2, ErrorKind::InvalidArgument, "grid needs at least 2 samples per axis");
        require(std::isfinite(x_min) && std::isfinite(x_max) && x_max > x_min,
                ErrorKind::InvalidArgument, "grid requires x_max > x_min");
        require(std::isfinite(p_min) && std::isfinite(p_max) && p_max > p_min,
                ErrorKind::InvalidArgument, "grid requires p_max > p_min");
        return PhaseGrid(x_min, x_max, n_x, p_min, p_max, n_p);
    }

    /// Grid from origin and spacing; the upper bounds follow as min + (n-1)*step.
    static PhaseGrid from_spacing(double x_min, double dx, std::size_t n_x,
                                  double p_min, double dp, std::size_t n_p) {
        require(dx > 0.0 && dp > 0.0, ErrorKind::InvalidArgument, "grid spacing must be positive");
        return make(x_min, x_min + static_cast<double>(n_x - 1) * dx, n_x,
                    p_min, p_min + static_cast<double>(n_p - 1) * dp, n_p);
    }

    double x_min() const noexcept { return x_min_; }
    double x_max() const noexcept { return x_max_; }
    double p_min() const noexcept { return p_min_; }
    double p_max() const noexcept { return p_max_; }
    std::size_t n_x() const noexcept { return n_x_; }
    std::size_t n_p() const noexcept { return n_p_; }
    double dx() const noexcept { return dx_; }
    double dp() const noexcept { return dp_; }
    std::size_t size() const noexcept { return n_x_ * n_p_; }

    double x(std::size_t i) const noexcept { return x_min_ + static_cast<double>(i) * dx_; }
    double p(std::size_t j) const noexcept { return p_min_ + static_cast<double>(j) * dp_; }

    Axis x_axis() const noexcept { return {x_min_, dx_, n_x_}; }
    Axis p_axis() const noexcept { return {p_min_, dp_, n_p_}; }

    /// Index of the p = 0 node; the momentum convolution needs one.
    std::optional<std::size_t> zero_p_index() const noexcept { return p_axis().node_of(0.0); }

    friend bool operator==(const PhaseGrid& a, const PhaseGrid& b) noexcept {
        return a.x_min_ == b.x_min_ && a.x_max_ == b.x_max_ && a.n_x_ == b.n_x_ &&
               a.p_min_ == b.p_min_ && a.p_max_ == b.p_max_ && a.n_p_ == b.n_p_;
    }

private:
    PhaseGrid(double x_min, double x_max, std::size_t n_x, double p_min, double p_max, std::size_t n_p)
        : x_min_(x_min), x_max_(x_max), p_min_(p_min), p_max_(p_max), n_x_(n_x), n_p_(n_p),
          dx_((x_max - x_min) / static_cast<double>(n_x - 1)),
          dp_((p_max - p_min) / static_cast<double>(n_p - 1)) {}

    double x_min_, x_max_, p_min_, p_max_;
    std::size_t n_x_, n_p_;
    double dx_, dp_;
};

inline void require_same_grid(const PhaseGrid& a, const PhaseGrid& b, const char* where) {
    require(a == b, ErrorKind::GridMismatch, std::string(where) + ": fields live on different grids");
}

/// Real field sampled on a PhaseGrid, row-major in x then p.
class WignerField {
public:
    explicit WignerField(PhaseGrid grid) : grid_(grid), values_(grid.size(), 0.0) {}

    WignerField(PhaseGrid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
        require(values_.size() == grid_.size(), ErrorKind::LengthMismatch,
                "WignerField: value count does not match grid");
        require(std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); }),
                ErrorKind::InvalidArgument, "WignerField: non-finite value");
    }

    const PhaseGrid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    double at(std::size_t i, std::size_t j) const noexcept { return values_[i * grid_.n_p() + j]; }
    double& at(std::size_t i, std::size_t j) noexcept { return values_[i * grid_.n_p() + j]; }

    std::span<const double> row(std::size_t i) const noexcept {
        return std::span<const double>(values_).subspan(i * grid_.n_p(), grid_.n_p());
    }
    std::span<double> row(std::size_t i) noexcept {
        return std::span<double>(values_).subspan(i * grid_.n_p(), grid_.n_p());
    }

    WignerField& operator*=(double a) noexcept {
        for (double& v : values_) v *= a;
        return *this;
    }
    WignerField& operator+=(const WignerField& other) {
        require_same_grid(grid_, other.grid_, "WignerField::operator+=");
        for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
        return *this;
    }
    WignerField& operator-=(const WignerField& other) {
        require_same_grid(grid_, other.grid_, "WignerField::operator-=");
        for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
        return *this;
    }

    friend WignerField operator*(double a, WignerField w) { return w *= a; }
    friend WignerField operator+(WignerField a, const WignerField& b) { return a += b; }
    friend WignerField operator-(WignerField a, const WignerField& b) { return a -= b; }

private:
    PhaseGrid grid_;
    std::vector<double> values_;
};

/// Complex wavefunction samples on a uniform spatial axis.
struct ComplexWave {
    Axis axis;
    std::vector<Complex> samples;

    ComplexWave() = default;
    ComplexWave(Axis a, std::vector<Complex> s) : axis(a), samples(std::move(s)) {
        require(samples.size() == axis.count, ErrorKind::LengthMismatch,
                "ComplexWave: sample count does not match axis");
    }
    static ComplexWave zeros(Axis a) { return ComplexWave(a, std::vector<Complex>(a.count)); }

    double norm2() const noexcept {
        double s = 0.0;
        for (const Complex& c : samples) s += std::norm(c);
        return s * axis.step;
    }
    bool is_unit_norm() const noexcept { return std::abs(norm2() - 1.0) < 1e-9; }
};

inline std::vector<double> marginal_x(const WignerField& w) {
    const auto& g = w.grid();
    std::vector<double> out(g.n_x(), 0.0);
    for (std::size_t i = 0; i < g.n_x(); ++i) {
        double s = 0.0;
        for (double v : w.row(i)) s += v;
        out[i] = s * g.dp();
    }
    return out;
}

inline std::vector<double> marginal_p(const WignerField& w) {
    const auto& g = w.grid();
    std::vector<double> out(g.n_p(), 0.0);
    for (std::size_t i = 0; i < g.n_x(); ++i) {
        const auto r = w.row(i);
        for (std::size_t j = 0; j < g.n_p(); ++j) out[j] += r[j];
    }
    for (double& v : out) v *= g.dx();
    return out;
}

inline double total_mass(const WignerField& w) {
    double s = 0.0;
    for (double v : w.values()) s += v;
    return s * w.grid().dx() * w.grid().dp();
}

inline double max_abs(const WignerField& w) {
    double m = 0.0;
    for (double v : w.values()) m = std::max(m, std::abs(v));
    return m;
}

/// Sum of |W| over the outermost `width` x-rows at each end, relative to the sum of |W|.
inline double edge_mass_fraction_x(const WignerField& w, std::size_t width = 2) {
    const auto& g = w.grid();
    double total = 0.0, edge = 0.0;
    for (std::size_t i = 0; i < g.n_x(); ++i) {
        double s = 0.0;
        for (double v : w.row(i)) s += std::abs(v);
        total += s;
        if (i < width || i + width >= g.n_x()) edge += s;
    }
    return total > 0.0 ? edge / total : 0.0;
}

/// Same as edge_mass_fraction_x, over the outermost momentum columns.
inline double edge_mass_fraction_p(const WignerField& w, std::size_t width = 2) {
    const auto& g = w.grid();
    double total = 0.0, edge = 0.0;
    for (std::size_t i = 0; i < g.n_x(); ++i) {
        const auto r = w.row(i);
        for (std::size_t j = 0; j < g.n_p(); ++j) {
            total += std::abs(r[j]);
            if (j < width || j + width >= g.n_p()) edge += std::abs(r[j]);
        }
    }
    return total > 0.0 ? edge / total : 0.0;
}

/// Bilinear read at an arbitrary phase-space point; 0 outside the grid.
inline double value_at(const WignerField& w, double x, double p) {
    const auto& g = w.grid();
    const double u = (x - g.x_min()) / g.dx();
    const double v = (p - g.p_min()) / g.dp();
    if (u < 0.0 || v < 0.0 || u > static_cast<double>(g.n_x() - 1) || v > static_cast<double>(g.n_p() - 1))
        return 0.0;
    const auto i = std::min(static_cast<std::size_t>(u), g.n_x() - 2);
    const auto j = std::min(static_cast<std::size_t>(v), g.n_p() - 2);
    const double fu = u - static_cast<double>(i), fv = v - static_cast<double>(j);
    return (1 - fu) * (1 - fv) * w.at(i, j) + fu * (1 - fv) * w.at(i + 1, j) +
           (1 - fu) * fv * w.at(i, j + 1) + fu * fv * w.at(i + 1, j + 1);
}

}  // namespace wigwall
