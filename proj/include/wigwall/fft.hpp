#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "wigwall/phase_grid.hpp"

namespace wigwall::fft {

enum class Direction { Forward, Backward };

namespace detail {

// FFTW planning is not thread-safe; execution with the new-array API is.
// Plans are created once per (size, direction) and live for the process.
inline fftw_plan cached_plan(std::size_t n, Direction dir) {
    static std::mutex mutex;
    static std::map<std::pair<std::size_t, int>, fftw_plan> plans;
    const std::lock_guard lock(mutex);
    const auto key = std::make_pair(n, dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD);
    if (auto it = plans.find(key); it != plans.end()) return it->second;
    std::vector<Complex> scratch(n);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, key.second,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans.emplace(key, plan);
    return plan;
}

}  // namespace detail

/// In-place unnormalized DFT: X_k = sum_n x_n exp(-+ 2 pi i n k / N).
inline void transform(std::span<Complex> data, Direction dir) {
    if (data.empty()) return;
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(detail::cached_plan(data.size(), dir), buf, buf);
}

inline std::size_t next_pow2(std::size_t n) {
    std::size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

/// Semi-discrete Fourier sum evaluated at an arbitrary arithmetic progression
/// of frequencies (Bluestein chirp-z):
///
///   out_j = sum_k in_k exp(i * p_j * y_k),  y_k = y0 + k*dy,  p_j = p.at(j).
inline std::vector<Complex> chirp_z(std::span<const Complex> in, double y0, double dy, const Axis& p) {
    const std::size_t n = in.size();
    const std::size_t m = p.count;
    std::vector<Complex> out(m);
    if (n == 0 || m == 0) return out;

    const double alpha = p.step * dy;
    const std::size_t len = next_pow2(n + m - 1);
    // exp(i*alpha*k^2/2)
    auto chirp = [alpha](std::size_t k) {
        const double ph = 0.5 * alpha * static_cast<double>(k) * static_cast<double>(k);
        return std::polar(1.0, ph);
    };

    std::vector<Complex> a(len), b(len);
    for (std::size_t k = 0; k < n; ++k)
        a[k] = in[k] * std::polar(1.0, p.start * dy * static_cast<double>(k)) * chirp(k);
    for (std::size_t k = 0; k < m; ++k) b[k] = std::conj(chirp(k));
    for (std::size_t k = 1; k < n; ++k) b[len - k] = std::conj(chirp(k));

    transform(a, Direction::Forward);
    transform(b, Direction::Forward);
    for (std::size_t k = 0; k < len; ++k) a[k] *= b[k];
    transform(a, Direction::Backward);

    const double scale = 1.0 / static_cast<double>(len);
    for (std::size_t j = 0; j < m; ++j)
        out[j] = a[j] * scale * chirp(j) * std::polar(1.0, p.at(j) * y0);
    return out;
}

/// Full linear convolution of two real sequences, length |u| + |v| - 1.
inline std::vector<double> linear_convolve(std::span<const double> u, std::span<const double> v) {
    if (u.empty() || v.empty()) return {};
    const std::size_t full = u.size() + v.size() - 1;
    const std::size_t len = next_pow2(full);
    std::vector<Complex> a(len), b(len);
    for (std::size_t k = 0; k < u.size(); ++k) a[k] = u[k];
    for (std::size_t k = 0; k < v.size(); ++k) b[k] = v[k];
    transform(a, Direction::Forward);
    transform(b, Direction::Forward);
    for (std::size_t k = 0; k < len; ++k) a[k] *= b[k];
    transform(a, Direction::Backward);
    std::vector<double> out(full);
    const double scale = 1.0 / static_cast<double>(len);
    for (std::size_t k = 0; k < full; ++k) out[k] = a[k].real() * scale;
    return out;
}

/// Angular wavenumbers matching FFTW's bin order for n samples of spacing h.
inline std::vector<double> wavenumbers(std::size_t n, double h) {
    std::vector<double> k(n);
    const double base = 2.0 * std::numbers::pi / (static_cast<double>(n) * h);
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = static_cast<long long>(i);
        const auto nn = static_cast<long long>(n);
        k[i] = base * static_cast<double>(s <= nn / 2 ? s : s - nn);
    }
    return k;
}

}  // namespace wigwall::fft
