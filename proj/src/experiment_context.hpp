#pragma once

#include <string>
#include <variant>
#include <vector>

#include "sdlab/harness.hpp"
#include "sdlab/radial.hpp"
#include "sdlab/skewprod.hpp"
#include "sdlab/sphere.hpp"
#include "sdlab/stats.hpp"

namespace sdlab::harness::detail {

/// Data written next to the report: a path table (CSV or JSON per --format) or
/// a JSON document.
struct Artifact {
    std::string stem;
    std::variant<radial::RadialPath, sphere::SpherePath, skewprod::PathR3, nlohmann::json> data;
};

class Context {
public:
    Context(const Resolved& cfg, Execution exec, Report& report, std::vector<Artifact>& artifacts)
        : cfg(cfg), exec(exec), report_(report), artifacts_(artifacts) {}

    const Resolved& cfg;
    const Execution exec;

    /// Per-ensemble master seed, distinct for every (experiment, tag) pair so
    /// that experiments never share paths.
    std::uint64_t seed(std::uint64_t tag) const { return derive_key(derive_key(cfg.seed, name_salt()), tag); }

    void close(const std::string& name, double value, double target, double tol, bool statistical = false);
    void less(const std::string& name, double value, double bound, bool statistical = false);
    void at_least(const std::string& name, double value, double bound, bool statistical = false);
    void greater(const std::string& name, double value, double bound, bool statistical = false);
    void covers(const std::string& name, const stats::EstimateWithCI& est, double target, double slack = 0.0);
    void equal(const std::string& name, bool value, bool expected);
    /// Informational comparison that never fails the experiment.
    void supplementary(Check c);

    void result(const std::string& key, nlohmann::json value) { report_.results[key] = std::move(value); }
    void warn(std::string msg) { report_.warnings.push_back(std::move(msg)); }
    void artifact(Artifact a) { artifacts_.push_back(std::move(a)); }
    bool underpowered() const { return report_.underpowered; }

    static Check make(std::string name, double value, double target, double tol, std::string relation);

private:
    std::uint64_t name_salt() const {
        // FNV-1a of the experiment name.
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (unsigned char ch : cfg.experiment) h = (h ^ ch) * 0x100000001b3ull;
        return h;
    }
    void add(Check c, bool statistical);

    Report& report_;
    std::vector<Artifact>& artifacts_;
};

using Runner = void (*)(Context&);

/// nullptr for unknown names.
Runner find_runner(const std::string& name);

}  // namespace sdlab::harness::detail
