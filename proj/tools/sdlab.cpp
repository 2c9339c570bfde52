#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sdlab/error.hpp"
#include "sdlab/harness.hpp"
#include "sdlab/io.hpp"

namespace {

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;
constexpr int exit_config = 2;

void print_summary(const sdlab::harness::Report& rep) {
    std::cout << rep.config.experiment << " (criterion " << rep.criterion << ")\n";
    for (const auto& c : rep.checks) {
        const char* tag = !c.enforced ? (c.pass ? "info" : "info-fail") : (c.pass ? "PASS" : "FAIL");
        std::cout << "  [" << tag << "] " << c.name << ": value=" << sdlab::io::format_double(c.value) << " "
                  << c.relation << " target=" << sdlab::io::format_double(c.target);
        if (c.relation == "abs_le") std::cout << " tol=" << sdlab::io::format_double(c.tolerance);
        std::cout << "\n";
    }
    for (const auto& w : rep.warnings) std::cout << "  warning: " << w << "\n";
    std::cout << "  wall clock " << rep.wall_clock_s << " s (budget " << rep.runtime_budget_s << " s)\n";
    std::cout << (rep.pass() ? "PASS" : "FAIL") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo experiments for a Brownian motion with a point interaction at the origin"};
    std::string experiment;
    std::string config_path;
    double gamma = 0.0, dt = 0.0, t_max = 0.0;
    std::size_t paths = 0;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::string format;
    bool list = false;
    bool serial = false;

    app.add_option("experiment", experiment, "Experiment name (see --list)");
    app.add_option("--config", config_path, "Flat JSON config file; command-line options override it");
    auto* o_gamma = app.add_option("--gamma", gamma, "Model parameter gamma > 0");
    auto* o_dt = app.add_option("--dt", dt, "Time step");
    auto* o_tmax = app.add_option("--t-max", t_max, "Horizon");
    auto* o_paths = app.add_option("--paths", paths, "Number of Monte Carlo paths");
    auto* o_seed = app.add_option("--seed", seed, "Master seed (fallback: SDLAB_SEED)");
    app.add_option("--out", out_dir, "Directory for the report and data files");
    app.add_option("--format", format, "Data file format")->check(CLI::IsMember({"csv", "json"}));
    app.add_flag("--list", list, "List experiments and exit");
    app.add_flag("--serial", serial, "Run ensembles on the serial reference path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_pass : exit_config;
    }

    if (list) {
        for (const auto& e : sdlab::harness::experiments())
            std::cout << e.name << "  [criterion " << e.criterion << "]  " << e.summary << "\n";
        return exit_pass;
    }

    try {
        sdlab::harness::RunConfig cfg;
        if (!config_path.empty()) cfg = sdlab::harness::load_config(config_path);
        if (!experiment.empty()) cfg.experiment = experiment;
        if (*o_gamma) cfg.gamma = gamma;
        if (*o_dt) cfg.dt = dt;
        if (*o_tmax) cfg.t_max = t_max;
        if (*o_paths) cfg.n_paths = paths;
        if (*o_seed) {
            cfg.seed = seed;
        } else if (!cfg.seed) {
            if (const char* env = std::getenv("SDLAB_SEED")) {
                try {
                    std::size_t used = 0;
                    const std::string s(env);
                    cfg.seed = std::stoull(s, &used);
                    if (used != s.size()) throw std::invalid_argument("trailing characters");
                } catch (const std::exception&) {
                    throw sdlab::ConfigError(std::string("SDLAB_SEED is not an unsigned integer: ") + env);
                }
            }
        }
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!format.empty()) cfg.format = format;

        const auto rep = sdlab::harness::run_experiment(
            cfg, serial ? sdlab::Execution::serial : sdlab::Execution::parallel);
        print_summary(rep);
        return rep.pass() ? exit_pass : exit_fail;
    } catch (const sdlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_config;
    }
}
