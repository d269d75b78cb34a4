#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "wigwall/scenario.hpp"

using namespace wigwall;
namespace fs = std::filesystem;

namespace {

const char* kHalfline = R"(
[geometry]
type = halfline

[packet]
x0 = 8
p0 = -4
sigma = 1

[grid]
x_min = -15
x_max = 14.8828125
n_x = 256
n_p = 256

[run]
times = 0, 2
outputs = report
)";

ScenarioConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "test.ini");
}

ErrorKind kind_of(const std::string& text) {
    try {
        auto cfg = parse(text);
        run_simulation(cfg);
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::IoError;  // sentinel: nothing thrown
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "wigwall_scenario_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(WIGWALL_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Config, ParsesSectionsAndDefaults) {
    const auto cfg = parse(kHalfline);
    ASSERT_TRUE(cfg.geometry);
    EXPECT_EQ(*cfg.geometry, GeometryType::Halfline);
    ASSERT_TRUE(cfg.packet);
    EXPECT_DOUBLE_EQ(cfg.packet->m, 1.0);
    EXPECT_EQ(cfg.times, (std::vector<double>{0.0, 2.0}));
    EXPECT_TRUE(cfg.outputs.report);
    EXPECT_FALSE(cfg.outputs.fields);
    const auto g = resolve_grid(cfg);
    EXPECT_EQ(g.n_x(), 256u);
    EXPECT_DOUBLE_EQ(g.x_min(), -15.0);
    EXPECT_DOUBLE_EQ(g.dx(), 30.0 / 256);
    EXPECT_DOUBLE_EQ(g.p_min(), -12.0);
    EXPECT_TRUE(g.zero_p_index());

    // Without [grid] keys the half-line window is wall +- 30 and p stays inside the band.
    auto bare = cfg;
    bare.x_min.reset();
    bare.x_max.reset();
    const auto d = resolve_grid(bare);
    EXPECT_DOUBLE_EQ(d.x_min(), -30.0);
    EXPECT_LT(-d.p_min() * 2.0 * d.dx(), std::numbers::pi);
}

TEST(Config, ErrorsNameLineAndField) {
    try {
        parse("[geometry]\ntype = halfline\n[packet]\nx0 = ten\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
        const std::string msg = e.what();
        EXPECT_NE(msg.find("test.ini:4"), std::string::npos) << msg;
        EXPECT_NE(msg.find("[packet] x0"), std::string::npos) << msg;
    }
    EXPECT_THROW(parse("[packet]\nx0 = 1\n"), Error);             // no geometry
    EXPECT_THROW(parse("[geometry]\ntype = cone\n"), Error);      // unknown geometry
    EXPECT_THROW(parse("[geometry]\ntype = box\na = 2\nb = 1\n"), Error);
    EXPECT_THROW(parse("[nowhere]\n"), Error);
    EXPECT_THROW(parse("[run]\nbackend = gpu\n"), Error);
}

TEST(Config, PacketOnTheWallIsAConfigError) {
    std::string text = kHalfline;
    text.replace(text.find("x0 = 8"), 6, "x0 = 2");
    EXPECT_EQ(kind_of(text), ErrorKind::ConfigError);
}

TEST(Config, BilliardDynamicsRefused) {
    EXPECT_EQ(kind_of("[geometry]\ntype = billiard2d\nR = 1\n[packet]\nx0 = 0\np0 = 0\nsigma = 0.2\n"),
              ErrorKind::ConfigError);
}

TEST(Scenario, HalflineReportWithinTolerance) {
    auto cfg = parse(kHalfline);
    cfg.out_dir = scratch("halfline");
    const auto s = run_simulation(cfg);
    ASSERT_EQ(s.report.size(), 2u);
    EXPECT_TRUE(s.within_tolerance());
    EXPECT_GT(s.report[1].kernel_tail_mass, 0.0);
    const auto text = slurp(cfg.out_dir / "report.csv");
    EXPECT_EQ(text.substr(0, text.find('\n')), "t,l2_rel,max_abs,mass_diff,kernel_tail_mass");
}

TEST(Scenario, DeterministicOutput) {
    auto cfg = parse(kHalfline);
    cfg.outputs.fields = true;
    cfg.outputs.marginals = true;
    cfg.times = {1.0};
    cfg.out_dir = scratch("det_a");
    run_simulation(cfg);
    const auto a = slurp(cfg.out_dir / "field_t1.csv");
    cfg.out_dir = scratch("det_b");
    run_simulation(cfg);
    EXPECT_EQ(a, slurp(cfg.out_dir / "field_t1.csv"));
    EXPECT_FALSE(a.empty());
}

TEST(Scenario, DemoNaiveViolation) {
    auto cfg = parse(kHalfline);
    cfg.out_dir = scratch("naive");
    cfg.outputs.fields = false;
    cfg.times = {0.0, 1.0, 2.0};
    const auto rows = run_demo_naive(cfg);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_GT(rows[2].naive_violation, 1e-3);
    for (const auto& r : rows) EXPECT_EQ(r.convolution_violation, 0.0);
    EXPECT_TRUE(fs::exists(cfg.out_dir / "violation.csv"));
}

TEST(Scenario, KernelOnlyForBilliard) {
    auto cfg = parse("[geometry]\ntype = billiard2d\nR = 1\n[billiard]\npoints = 3\ndy = 0.1\nn_p = 21\ndp = 0.2\n");
    cfg.out_dir = scratch("billiard");
    const auto s = run_kernel(cfg);
    EXPECT_TRUE(fs::exists(cfg.out_dir / "kernel2d.csv"));
    EXPECT_LT(s.square_symmetry, 1e-12);
}

TEST(Cli, ExitCodes) {
    const auto out = scratch("cli");
    const std::string cfgdir = WIGWALL_CONFIG_DIR;
    EXPECT_EQ(run_cli("kernel --config " + cfgdir + "/billiard2d.ini --out " + out.string()), 0);
    EXPECT_TRUE(fs::exists(out / "kernel2d.csv"));
    EXPECT_EQ(run_cli("kernel --config " + cfgdir + "/halfline_bounce.ini --out " + out.string()), 0);
    EXPECT_EQ(run_cli("simulate --config " + out.string() + "/missing.ini"), 2);

    const auto bad = out / "wall.ini";
    std::ofstream(bad) << "[geometry]\ntype = halfline\n[packet]\nx0 = 1\np0 = 0\nsigma = 1\n";
    EXPECT_EQ(run_cli("simulate --config " + bad.string() + " --out " + out.string()), 2);

    const auto escape = out / "escape.ini";
    std::ofstream(escape) << "[geometry]\ntype = halfline\n[packet]\nx0 = 10\np0 = 3\nsigma = 1\n"
                             "[grid]\nn_x = 256\nn_p = 256\n[run]\ntimes = 8\noutputs = fields\n";
    EXPECT_EQ(run_cli("simulate --config " + escape.string() + " --out " + out.string()), 3);

    EXPECT_NE(run_cli("simulate --config " + cfgdir + "/box.ini --backend gpu"), 0);
}
