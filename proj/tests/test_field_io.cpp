#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "support.hpp"
#include "wigwall/field_io.hpp"

using namespace wigwall;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "wigwall_io_test";
    fs::create_directories(dir);
    return dir / name;
}

WignerField random_field() {
    const auto g = PhaseGrid::from_spacing(-3.0, 0.1, 37, -2.0, 0.05, 41);
    std::mt19937 rng(21);
    std::normal_distribution<double> d;
    std::vector<double> v(g.size());
    for (double& x : v) x = d(rng) * 1e-3;
    return WignerField(g, std::move(v));
}

}  // namespace

TEST(FieldIo, BinaryRoundTripIsBitExact) {
    const auto w = random_field();
    const auto path = scratch("field.bin");
    write_binary(w, path);
    EXPECT_EQ(fs::file_size(path), 6 * 8 + 2 * 8 + w.values().size() * 8);
    const auto r = read_binary(path);
    EXPECT_EQ(r.grid(), w.grid());
    for (std::size_t k = 0; k < w.values().size(); ++k) ASSERT_EQ(r.values()[k], w.values()[k]);
}

TEST(FieldIo, CsvRoundTripIsBitExact) {
    const auto w = random_field();
    const auto path = scratch("field.csv");
    write_csv(w, path, "comment line");
    const auto r = read_csv(path);
    EXPECT_EQ(r.grid().n_x(), w.grid().n_x());
    EXPECT_EQ(r.grid().n_p(), w.grid().n_p());
    for (std::size_t k = 0; k < w.values().size(); ++k) ASSERT_EQ(r.values()[k], w.values()[k]);
}

TEST(FieldIo, CsvHeaderAndOrder) {
    const auto g = PhaseGrid::make(0.0, 1.0, 2, -1.0, 1.0, 3);
    WignerField w(g, {1, 2, 3, 4, 5, 6});
    const auto path = scratch("small.csv");
    write_csv(w, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "x,p,value");
    std::getline(in, line);
    EXPECT_EQ(line, "0,-1,1");
    std::getline(in, line);
    EXPECT_EQ(line, "0,0,2");
}

TEST(FieldIo, KernelExportCarriesProvenance) {
    const auto g = wigwall::testing::bounce_grid(64);
    const auto k = interval_kernel(g, -7.5, 15.0);
    const auto path = scratch("kernel.csv");
    write_kernel_csv(k, path);
    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    EXPECT_EQ(first, "# kernel provenance=analytic-interval a=-7.5 b=15");
    const auto r = read_csv(path);
    for (std::size_t k2 = 0; k2 < k.values.size(); ++k2) ASSERT_EQ(r.values()[k2], k.values[k2]);

    const auto bin = scratch("kernel.bin");
    write_kernel_binary(k, bin);
    std::ifstream meta(bin.string() + ".meta");
    std::getline(meta, first);
    EXPECT_EQ(first, "kernel provenance=analytic-interval a=-7.5 b=15");
}

TEST(FieldIo, TruncatedFilesRejected) {
    const auto w = random_field();
    const auto path = scratch("short.bin");
    write_binary(w, path);
    fs::resize_file(path, fs::file_size(path) - 8);
    try {
        read_binary(path);
        FAIL() << "expected IoError";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::IoError);
    }
    EXPECT_THROW(read_csv(scratch("does_not_exist.csv")), Error);
}
