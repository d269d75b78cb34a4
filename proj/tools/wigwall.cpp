#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "wigwall/wigwall.hpp"

namespace {

constexpr int kValidationFailed = 1;
constexpr int kConfigInvalid = 2;
constexpr int kNumericalGuard = 3;

struct Common {
    std::string config;
    std::string out;
    std::string backend;
    unsigned threads = 0;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "scenario file (key = value, [sections])")->required();
    cmd->add_option("--out", c.out, "output directory (overrides [run] out)");
    cmd->add_option("--backend", c.backend, "momentum convolution backend")
        ->check(CLI::IsMember({"direct", "fft"}));
    cmd->add_option("--threads", c.threads, "worker threads, 0 = hardware concurrency");
}

wigwall::ScenarioConfig load(const Common& c) {
    auto cfg = wigwall::load_config(c.config);
    if (!c.out.empty()) cfg.out_dir = c.out;
    if (!c.backend.empty()) cfg.backend = wigwall::parse_backend(c.backend);
    wigwall::set_thread_count(c.threads);
    return cfg;
}

void print_report(const wigwall::RunSummary& s) {
    if (s.report.empty()) return;
    std::printf("%-8s %-12s %-12s %-12s %-12s\n", "t", "l2_rel", "max_abs", "mass_diff", "tail_mass");
    for (const auto& r : s.report)
        std::printf("%-8g %-12.4e %-12.4e %-12.4e %-12.4e\n", r.t, r.l2_rel, r.max_abs, r.mass_diff,
                    r.kernel_tail_mass);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wigner-function dynamics with hard walls: free shear, then momentum convolution with the wall "
                 "kernel.\nUnits: hbar = 1; the mass m is set per packet.\nExit codes: 0 success, 1 oracle tolerance "
                 "exceeded (validate), 2 invalid configuration, 3 numerical guard (support escaped, Nyquist, "
                 "domain too small)."};
    app.require_subcommand(1);

    Common sim, ker, val, naive;
    auto* c_sim = app.add_subcommand("simulate", "bounded fields, marginals and oracle report for every time");
    auto* c_ker = app.add_subcommand("kernel", "write the wall kernel only");
    auto* c_val = app.add_subcommand("validate", "simulate and fail unless every l2_rel is below tolerance");
    auto* c_naive = app.add_subcommand("demo-naive", "masked-then-sheared field next to the convolution field");
    add_common(c_sim, sim);
    add_common(c_ker, ker);
    add_common(c_val, val);
    add_common(c_naive, naive);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_sim->parsed()) {
            const auto s = wigwall::run_simulation(load(sim));
            print_report(s);
            std::printf("wrote %zu files\n", s.files.size());
        } else if (c_ker->parsed()) {
            const auto cfg = load(ker);
            const auto s = wigwall::run_kernel(cfg);
            if (cfg.geometry == wigwall::GeometryType::Billiard2d)
                std::printf("square symmetry defect %.3e, ring anisotropy %.3e\n", s.square_symmetry,
                            s.ring_anisotropy);
            std::printf("wrote %zu files\n", s.files.size());
        } else if (c_val->parsed()) {
            auto cfg = load(val);
            cfg.outputs.report = true;
            const auto s = wigwall::run_simulation(cfg);
            print_report(s);
            const bool ok = s.within_tolerance();
            std::printf("%s: max l2_rel tolerance %.1e\n", ok ? "PASS" : "FAIL", s.tolerance);
            return ok ? 0 : kValidationFailed;
        } else {
            const auto rows = wigwall::run_demo_naive(load(naive));
            std::printf("%-8s %-16s %-16s\n", "t", "naive", "convolution");
            for (const auto& r : rows) std::printf("%-8g %-16.6e %-16.6e\n", r.t, r.naive_violation, r.convolution_violation);
        }
    } catch (const wigwall::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return wigwall::is_numerical_guard(e.kind()) ? kNumericalGuard : kConfigInvalid;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfigInvalid;
    }
    return 0;
}
