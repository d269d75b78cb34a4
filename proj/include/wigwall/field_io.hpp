#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "wigwall/boundary_kernels.hpp"
#include "wigwall/phase_grid.hpp"

namespace wigwall {

static_assert(std::endian::native == std::endian::little, "binary field format assumes a little-endian host");

namespace detail {

inline std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode);
    require(static_cast<bool>(out), ErrorKind::IoError, "cannot open " + path.string() + " for writing");
    return out;
}

inline std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    require(static_cast<bool>(in), ErrorKind::IoError, "cannot open " + path.string());
    return in;
}

inline void write_csv_body(std::ostream& out, const PhaseGrid& g, std::span<const double> values) {
    out << "x,p,value\n";
    for (std::size_t i = 0; i < g.n_x(); ++i)
        for (std::size_t j = 0; j < g.n_p(); ++j)
            out << fmt17(g.x(i)) << ',' << fmt17(g.p(j)) << ',' << fmt17(values[i * g.n_p() + j]) << '\n';
}

}  // namespace detail

/// CSV with header `x,p,value`, one line per node, x-major. Lines starting
/// with '#' carry metadata and are ignored by the reader.
inline void write_csv(const WignerField& w, const std::filesystem::path& path, const std::string& comment = {}) {
    auto out = detail::open_out(path);
    if (!comment.empty()) out << "# " << comment << '\n';
    detail::write_csv_body(out, w.grid(), w.values());
    require(static_cast<bool>(out), ErrorKind::IoError, "write failed: " + path.string());
}

/// Reads a CSV written by write_csv. The grid is recovered from the distinct
/// x and p values; rows must be complete and in x-major order.
inline WignerField read_csv(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    std::string line;
    bool header = false;
    std::vector<double> xs, ps, vals;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            require(line == "x,p,value", ErrorKind::IoError, path.string() + ": expected header x,p,value");
            header = true;
            continue;
        }
        double x = 0, p = 0, v = 0;
        char c1 = 0, c2 = 0;
        std::istringstream ss(line);
        ss >> x >> c1 >> p >> c2 >> v;
        require(ss && c1 == ',' && c2 == ',', ErrorKind::IoError,
                path.string() + ":" + std::to_string(lineno) + ": malformed row");
        if (xs.empty() || xs.back() != x) xs.push_back(x);
        if (xs.size() == 1) ps.push_back(p);
        vals.push_back(v);
    }
    require(header && xs.size() >= 2 && ps.size() >= 2 && vals.size() == xs.size() * ps.size(), ErrorKind::IoError,
            path.string() + ": incomplete field");
    auto grid = PhaseGrid::make(xs.front(), xs.back(), xs.size(), ps.front(), ps.back(), ps.size());
    return WignerField(grid, std::move(vals));
}

namespace detail {

inline void write_binary_body(std::ostream& out, const PhaseGrid& g, std::span<const double> values) {
    const double head[6] = {g.x_min(), g.x_max(), g.dx(), g.p_min(), g.p_max(), g.dp()};
    const std::uint64_t dims[2] = {g.n_x(), g.n_p()};
    out.write(reinterpret_cast<const char*>(head), sizeof head);
    out.write(reinterpret_cast<const char*>(dims), sizeof dims);
    out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
}

}  // namespace detail

/// Little-endian binary: x_min, x_max, dx, p_min, p_max, dp as float64,
/// n_x, n_p as uint64, then n_x * n_p float64 values, x-major.
inline void write_binary(const WignerField& w, const std::filesystem::path& path) {
    auto out = detail::open_out(path, std::ios::out | std::ios::binary);
    detail::write_binary_body(out, w.grid(), w.values());
    require(static_cast<bool>(out), ErrorKind::IoError, "write failed: " + path.string());
}

inline WignerField read_binary(const std::filesystem::path& path) {
    auto in = detail::open_in(path, std::ios::in | std::ios::binary);
    double head[6];
    std::uint64_t dims[2];
    in.read(reinterpret_cast<char*>(head), sizeof head);
    in.read(reinterpret_cast<char*>(dims), sizeof dims);
    require(static_cast<bool>(in), ErrorKind::IoError, path.string() + ": truncated header");
    require(dims[0] >= 2 && dims[1] >= 2 && dims[0] < (1u << 24) && dims[1] < (1u << 24), ErrorKind::IoError,
            path.string() + ": implausible dimensions");
    std::vector<double> vals(dims[0] * dims[1]);
    in.read(reinterpret_cast<char*>(vals.data()), static_cast<std::streamsize>(vals.size() * sizeof(double)));
    require(static_cast<bool>(in), ErrorKind::IoError, path.string() + ": truncated values");
    auto grid = PhaseGrid::make(head[0], head[1], dims[0], head[3], head[4], dims[1]);
    return WignerField(grid, std::move(vals));
}

/// "kernel provenance=<tag> <geometry>"
inline std::string kernel_metadata(const BoundaryKernel& k) {
    return "kernel provenance=" + std::string(to_string(k.provenance)) + " " + k.geometry;
}

inline void write_kernel_csv(const BoundaryKernel& k, const std::filesystem::path& path) {
    write_csv(k.as_field(), path, kernel_metadata(k));
}

/// Binary field followed by a sidecar `<path>.meta` holding the metadata line.
inline void write_kernel_binary(const BoundaryKernel& k, const std::filesystem::path& path) {
    write_binary(k.as_field(), path);
    auto meta = detail::open_out(path.string() + ".meta");
    meta << kernel_metadata(k) << '\n';
}

/// Writes x-marginal and p-marginal as two-column CSV files.
inline void write_marginals(const WignerField& w, const std::filesystem::path& x_path,
                            const std::filesystem::path& p_path) {
    const auto& g = w.grid();
    const auto mx = marginal_x(w);
    const auto mp = marginal_p(w);
    auto ox = detail::open_out(x_path);
    ox << "x,density\n";
    for (std::size_t i = 0; i < g.n_x(); ++i) ox << detail::fmt17(g.x(i)) << ',' << detail::fmt17(mx[i]) << '\n';
    auto op = detail::open_out(p_path);
    op << "p,density\n";
    for (std::size_t j = 0; j < g.n_p(); ++j) op << detail::fmt17(g.p(j)) << ',' << detail::fmt17(mp[j]) << '\n';
}

}  // namespace wigwall
