#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdlab/ensemble.hpp"

namespace sdlab::harness {

/// User-facing configuration. Unset fields take the experiment's
/// acceptance-scale defaults.
struct RunConfig {
    std::string experiment;
    std::optional<double> gamma;
    std::optional<double> dt;
    std::optional<double> t_max;
    std::optional<std::size_t> n_paths;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string format = "csv";
};

/// RunConfig with every field filled in.
struct Resolved {
    std::string experiment;
    double gamma = 1.0;
    double dt = 1e-3;
    double t_max = 1.0;
    std::size_t n_paths = 1;
    std::uint64_t seed = 1;
    std::string out_dir;
    std::string format = "csv";
};

struct ExperimentInfo {
    std::string name;
    /// Acceptance criterion (and part) the experiment addresses, e.g. "4.regulator-rate".
    std::string criterion;
    std::string summary;
    Resolved defaults;
    /// Wall-clock budget in seconds at the default scale.
    double runtime_budget = 0.0;
};

const std::vector<ExperimentInfo>& experiments();
const ExperimentInfo& experiment_info(const std::string& name);

/// One tolerance comparison. `relation` is one of "abs_le" (|value - target|
/// <= tolerance), "lt", "le", "gt", "ge" (value against target) or "eq".
struct Check {
    std::string criterion;
    std::string name;
    double value = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    std::string relation;
    bool pass = false;
    /// Non-enforced checks are reported but do not affect the verdict.
    bool enforced = true;
};

struct Report {
    Resolved config;
    std::string criterion;
    std::vector<Check> checks;
    nlohmann::json results = nlohmann::json::object();
    std::vector<std::string> warnings;
    bool underpowered = false;
    double wall_clock_s = 0.0;
    double runtime_budget_s = 0.0;

    bool pass() const;
    nlohmann::json to_json(bool include_wall_clock = true) const;
};

/// Parses a flat JSON object with keys experiment, gamma, dt, t_max, n_paths,
/// seed, out_dir, format. Unknown keys and wrong types throw ConfigError.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Fills defaults and validates. Throws ConfigError.
Resolved resolve(const RunConfig& cfg);

/// Runs the experiment, writes the report (and path files) into out_dir when
/// set. Throws ConfigError on invalid configuration.
Report run_experiment(const RunConfig& cfg, Execution exec = Execution::parallel);
Report run_experiment_file(const std::string& path, Execution exec = Execution::parallel);

}  // namespace sdlab::harness
