#include "sdlab/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "experiment_context.hpp"
#include "sdlab/error.hpp"
#include "sdlab/io.hpp"

namespace sdlab::harness {

namespace {

ExperimentInfo info(std::string name, std::string criterion, std::string summary, double gamma, double dt,
                    double t_max, std::size_t n_paths, double budget) {
    ExperimentInfo e;
    e.name = name;
    e.criterion = std::move(criterion);
    e.summary = std::move(summary);
    e.defaults.experiment = std::move(name);
    e.defaults.gamma = gamma;
    e.defaults.dt = dt;
    e.defaults.t_max = t_max;
    e.defaults.n_paths = n_paths;
    e.defaults.seed = 1;
    e.runtime_budget = budget;
    return e;
}

}  // namespace

const std::vector<ExperimentInfo>& experiments() {
    // dt doubles as the finite-difference step (eigen), the drift horizon h
    // (x0-*) and the sphere substep (sphere-mixing); t_max as the uniformity
    // horizon (sphere-mixing) and T (tv-divergence).
    static const std::vector<ExperimentInfo> list{
        info("capacity", "1", "capacity of the origin and equilibrium energy", 1.0, 0.0, 0.0, 0, 1.0),
        info("eigen", "2", "finite-difference eigen-identity residual", 1.0, 1e-4, 0.0, 0, 1.0),
        info("radial-absorb", "3", "absorption time and exit probability of the radial part", 1.0, 1e-3, 50.0,
             10000, 30.0),
        info("radial-stationary", "4.stationary-law", "long-run law of the reflected radial part", 1.0, 1e-3, 20.0,
             10000, 60.0),
        info("regulator", "4.regulator-rate", "Skorokhod regulator rate and local-time normalizations", 1.0, 1e-3,
             20.0, 2000, 60.0),
        info("sphere-mixing", "5", "sphere BM correlation decay and uniformity", 1.0, 0.01, 8.0, 10000, 60.0),
        info("x0-drift", "6.drift", "small-time drift of the killed process", 1.0, 1e-3, 0.0, 100000, 120.0),
        info("x0-generator", "6.generator", "generator on test functions (supplementary to 6)", 1.0, 1e-3, 0.0,
             100000, 120.0),
        info("timechange-blowup", "7", "growth of the time change before absorption", 1.0, 1e-5, 50.0, 1000, 60.0),
        info("x-invariant", "8.invariance", "long-run law of |X|", 1.0, 1e-4, 10.0, 10000, 120.0),
        info("x-regular-origin", "8.origin-regularity", "returns to the origin from the origin", 1.0, 1e-4, 0.1, 10000,
             120.0),
        info("excursion-coverage", "9", "sphere coverage of excursion angular parts", 1.0, 1e-4, 50.0, 20, 120.0),
        info("tv-divergence", "10", "growth of the drift total variation along truncations", 1.0, 1e-3, 1.0, 4000,
             300.0),
        info("approx-converge", "11", "truncated approximants versus the full process", 1.0, 1e-3, 1.0, 5000, 300.0),
        info("integrability", "12", "excursion-lifetime integrability by dimension", 1.0, 0.0, 0.0, 0, 1.0),
    };
    return list;
}

const ExperimentInfo& experiment_info(const std::string& name) {
    for (const auto& e : experiments())
        if (e.name == name) return e;
    throw ConfigError("unknown experiment '" + name + "'");
}

bool Report::pass() const {
    for (const auto& c : checks)
        if (c.enforced && !c.pass) return false;
    return true;
}

nlohmann::json Report::to_json(bool include_wall_clock) const {
    nlohmann::json j;
    j["config"] = {{"experiment", config.experiment}, {"gamma", config.gamma},     {"dt", config.dt},
                   {"t_max", config.t_max},           {"n_paths", config.n_paths}, {"seed", config.seed},
                   {"out_dir", config.out_dir},       {"format", config.format}};
    j["criterion"] = criterion;
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks)
        j["checks"].push_back({{"criterion", c.criterion},
                               {"name", c.name},
                               {"value", c.value},
                               {"target", c.target},
                               {"tolerance", c.tolerance},
                               {"relation", c.relation},
                               {"pass", c.pass},
                               {"enforced", c.enforced}});
    j["results"] = results;
    j["warnings"] = warnings;
    j["underpowered"] = underpowered;
    j["pass"] = pass();
    j["runtime_budget_s"] = runtime_budget_s;
    if (include_wall_clock) j["wall_clock_s"] = wall_clock_s;
    return j;
}

RunConfig parse_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::set<std::string> known{"experiment", "gamma", "dt",      "t_max",
                                             "n_paths",    "seed",  "out_dir", "format"};
    RunConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
        try {
            if (key == "experiment") cfg.experiment = value.get<std::string>();
            if (key == "gamma") cfg.gamma = value.get<double>();
            if (key == "dt") cfg.dt = value.get<double>();
            if (key == "t_max") cfg.t_max = value.get<double>();
            if (key == "out_dir") cfg.out_dir = value.get<std::string>();
            if (key == "format") cfg.format = value.get<std::string>();
            if (key == "n_paths") {
                if (!value.is_number_integer() || value.get<std::int64_t>() < 1)
                    throw ConfigError("n_paths must be a positive integer");
                cfg.n_paths = value.get<std::size_t>();
            }
            if (key == "seed") {
                if (!value.is_number_integer()) throw ConfigError("seed must be an integer");
                cfg.seed = value.get<std::uint64_t>();
            }
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("bad value for '" + key + "': " + e.what());
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file " + path);
    try {
        return parse_config(nlohmann::json::parse(f));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
}

Resolved resolve(const RunConfig& cfg) {
    if (cfg.experiment.empty()) throw ConfigError("no experiment given");
    const auto& e = experiment_info(cfg.experiment);
    Resolved r = e.defaults;
    if (cfg.gamma) r.gamma = *cfg.gamma;
    if (cfg.dt) r.dt = *cfg.dt;
    if (cfg.t_max) r.t_max = *cfg.t_max;
    if (cfg.n_paths) r.n_paths = *cfg.n_paths;
    if (cfg.seed) r.seed = *cfg.seed;
    r.out_dir = cfg.out_dir;
    r.format = cfg.format;
    if (!(r.gamma > 0.0) || !std::isfinite(r.gamma)) throw ConfigError("gamma must be positive");
    if (r.format != "csv" && r.format != "json") throw ConfigError("format must be csv or json");
    if (e.defaults.dt > 0.0 && (!(r.dt > 0.0) || !std::isfinite(r.dt))) throw ConfigError("dt must be positive");
    if (e.defaults.t_max > 0.0 && !(r.t_max >= r.dt)) throw ConfigError("t_max must be >= dt");
    if (e.defaults.n_paths > 0 && r.n_paths < 2) throw ConfigError("n_paths must be >= 2");
    return r;
}

namespace {

void write_outputs(const Report& report, const std::vector<detail::Artifact>& artifacts) {
    const auto& cfg = report.config;
    if (cfg.out_dir.empty()) return;
    const std::string base = cfg.out_dir + "/" + cfg.experiment;
    io::write_file(base + ".report.json", report.to_json().dump(2) + "\n");
    for (const auto& a : artifacts) {
        std::visit(
            [&](const auto& data) {
                using T = std::decay_t<decltype(data)>;
                if constexpr (std::is_same_v<T, nlohmann::json>) {
                    io::write_file(base + "." + a.stem + ".json", data.dump(2) + "\n");
                } else if (cfg.format == "json") {
                    io::write_file(base + "." + a.stem + ".json", io::to_table_json(data).dump() + "\n");
                } else {
                    std::ostringstream os;
                    io::write_csv(os, data);
                    io::write_file(base + "." + a.stem + ".csv", os.str());
                }
            },
            a.data);
    }
}

}  // namespace

Report run_experiment(const RunConfig& cfg, Execution exec) {
    const Resolved r = resolve(cfg);
    const auto& e = experiment_info(r.experiment);
    Report report;
    report.config = r;
    report.criterion = e.criterion;
    report.runtime_budget_s = e.runtime_budget;
    if (e.defaults.n_paths > 0 && r.n_paths < e.defaults.n_paths) {
        report.underpowered = true;
        report.warnings.push_back("underpowered: n_paths=" + std::to_string(r.n_paths) +
                                  " is below the acceptance scale " + std::to_string(e.defaults.n_paths) +
                                  "; statistical checks are reported but not enforced");
    }
    std::vector<detail::Artifact> artifacts;
    detail::Context ctx(r, exec, report, artifacts);
    const auto runner = detail::find_runner(r.experiment);
    if (!runner) throw ConfigError("experiment '" + r.experiment + "' has no implementation");
    const auto t0 = std::chrono::steady_clock::now();
    try {
        runner(ctx);
    } catch (const SampleSizeError& err) {
        throw ConfigError(err.what());
    } catch (const DomainError& err) {
        throw ConfigError(err.what());
    }
    report.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_outputs(report, artifacts);
    return report;
}

Report run_experiment_file(const std::string& path, Execution exec) { return run_experiment(load_config(path), exec); }

}  // namespace sdlab::harness
