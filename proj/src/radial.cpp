#include "sdlab/radial.hpp"

#include <cmath>

#include "sdlab/error.hpp"

namespace sdlab::radial {

void SimConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("SimConfig: dt must be positive");
    if (!(t_max >= dt)) throw DomainError("SimConfig: need dt <= t_max");
    if (n_paths < 1) throw DomainError("SimConfig: n_paths must be >= 1");
}

std::size_t SimConfig::steps() const { return static_cast<std::size_t>(std::llround(t_max / dt)); }

ScaleSpeed scale_and_speed(const ModelParams& p, double x) {
    if (x < 0.0) throw DomainError("scale_and_speed: x must be >= 0");
    const double g = p.gamma();
    return {std::exp(2.0 * g * x) / (4.0 * g * g), 2.0 * g * std::exp(-2.0 * g * x)};
}

double hit_prob_zero_before(const ModelParams& p, double x, double b) {
    if (!(x > 0.0) || !(x < b)) throw DomainError("hit_prob_zero_before: need 0 < x < b");
    const double g = p.gamma();
    // (e^{2gb} - e^{2gx}) / (e^{2gb} - 1) rewritten to stay finite for large b.
    return std::expm1(-2.0 * g * (b - x)) / std::expm1(-2.0 * g * b);
}

double expected_absorption_time(const ModelParams& p, double x) {
    if (x < 0.0) throw DomainError("expected_absorption_time: x must be >= 0");
    return x / p.gamma();
}

double bridge_hit_probability(double a, double b, double dt) {
    if (a <= 0.0 || b <= 0.0) return 1.0;
    return std::exp(-2.0 * a * b / dt);
}

RadialPath sample_absorbed_path(const ModelParams& p, double x0, const SimConfig& cfg, Stream& rng) {
    if (!(x0 > 0.0)) throw DomainError("sample_absorbed_path: x0 must be positive");
    cfg.validate();
    const std::size_t steps = cfg.steps();
    const double drift = -p.gamma() * cfg.dt;
    const double sd = std::sqrt(cfg.dt);

    RadialPath path;
    path.dt = cfg.dt;
    path.values.reserve(std::min<std::size_t>(steps + 1, 1u << 20));
    path.values.push_back(x0);
    double r = x0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double next = r + drift + sd * rng.normal();
        const double u = rng.uniform();
        bool hit = next <= 0.0;
        if (!hit && cfg.bridge_correction && u < bridge_hit_probability(r, next, cfg.dt)) {
            hit = true;
            path.bridge_hit = true;
        }
        if (hit) {
            path.values.push_back(0.0);
            path.absorbed = true;
            path.absorption_index = k + 1;
            return path;
        }
        path.values.push_back(next);
        r = next;
    }
    return path;
}

ExitSide sample_exit_side(const ModelParams& p, double x0, double b, const SimConfig& cfg, Stream& rng) {
    if (!(x0 > 0.0) || !(x0 < b)) throw DomainError("sample_exit_side: need 0 < x0 < b");
    cfg.validate();
    const std::size_t steps = cfg.steps();
    const double drift = -p.gamma() * cfg.dt;
    const double sd = std::sqrt(cfg.dt);
    double r = x0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double next = r + drift + sd * rng.normal();
        const double u = rng.uniform();
        if (next <= 0.0) return ExitSide::zero;
        if (next >= b) return ExitSide::upper;
        if (cfg.bridge_correction) {
            // The two crossing events are disjoint to first order; split one
            // uniform between them.
            const double p_low = bridge_hit_probability(r, next, cfg.dt);
            const double p_up = bridge_hit_probability(b - r, b - next, cfg.dt);
            if (u < p_low) return ExitSide::zero;
            if (u < p_low + p_up) return ExitSide::upper;
        }
        r = next;
    }
    return ExitSide::none;
}

RadialPath sample_reflected_path(const ModelParams& p, double x0, const SimConfig& cfg, Stream& rng) {
    if (!(x0 >= 0.0)) throw DomainError("sample_reflected_path: x0 must be >= 0");
    cfg.validate();
    const std::size_t steps = cfg.steps();
    const double drift = -p.gamma() * cfg.dt;
    const double sd = std::sqrt(cfg.dt);

    RadialPath path;
    path.dt = cfg.dt;
    path.values.resize(steps + 1);
    std::vector<double> reg(steps + 1, 0.0);
    path.values[0] = x0;
    double r = x0;
    double lambda = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double proposal = r + drift + sd * rng.normal();
        r = std::abs(proposal);
        if (proposal < 0.0) lambda += r - proposal;
        path.values[k + 1] = r;
        reg[k + 1] = lambda;
    }
    path.regulator = std::move(reg);
    return path;
}

ReflectedEnd run_reflected(const ModelParams& p, double x0, double dt, std::size_t steps, Stream& rng) {
    if (!(x0 >= 0.0)) throw DomainError("run_reflected: x0 must be >= 0");
    const double drift = -p.gamma() * dt;
    const double sd = std::sqrt(dt);
    double r = x0;
    double lambda = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double proposal = r + drift + sd * rng.normal();
        r = std::abs(proposal);
        if (proposal < 0.0) lambda += r - proposal;
    }
    return {r, lambda};
}

LocalTimeEstimate occupation_local_time(const RadialPath& path, double band) {
    if (!(band > 0.0)) throw DomainError("occupation_local_time: band must be positive");
    std::size_t count = 0;
    for (std::size_t k = 0; k + 1 < path.values.size(); ++k)
        if (path.values[k] < band) ++count;
    return {path.dt * static_cast<double>(count) / (2.0 * band), band < std::sqrt(path.dt)};
}

double default_band(double dt) { return 10.0 * std::sqrt(dt); }

double stationary_sampler(const ModelParams& p, Stream& rng) { return -std::log(rng.uniform()) / (2.0 * p.gamma()); }

}  // namespace sdlab::radial
