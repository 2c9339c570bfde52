#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "sdlab/model.hpp"
#include "sdlab/rng.hpp"

namespace sdlab::radial {

using model::ModelParams;

/// A 1D trajectory on the uniform grid t_k = k dt.
///
/// Absorbed paths stop at `absorption_index`, where the value is 0. Reflected
/// paths carry `regulator`, the cumulative pushing term Lambda with
/// values[k] = values[0] + (free increments) + regulator[k].
struct RadialPath {
    double dt = 0.0;
    std::vector<double> values;
    bool absorbed = false;
    std::optional<std::size_t> absorption_index;
    /// Absorption decided by the Brownian-bridge test rather than a grid crossing.
    bool bridge_hit = false;
    std::optional<std::vector<double>> regulator;

    std::size_t size() const { return values.size(); }
    double duration() const { return values.empty() ? 0.0 : dt * static_cast<double>(values.size() - 1); }
    std::optional<double> absorption_time() const {
        if (!absorption_index) return std::nullopt;
        return dt * static_cast<double>(*absorption_index);
    }
};

struct SimConfig {
    double dt = 1e-3;
    double t_max = 1.0;
    std::size_t n_paths = 1;
    std::uint64_t seed = 0;
    bool bridge_correction = true;

    /// Throws DomainError unless 0 < dt <= t_max and n_paths >= 1.
    void validate() const;
    std::size_t steps() const;
};

struct ScaleSpeed {
    double scale = 0.0;
    double speed_density = 0.0;
};

/// s(x) = e^{2 gamma x} / (4 gamma^2) and l'(x) = 2 gamma e^{-2 gamma x}.
ScaleSpeed scale_and_speed(const ModelParams& p, double x);

/// P_x(hit 0 before b) = (e^{2 gamma b} - e^{2 gamma x}) / (e^{2 gamma b} - 1).
double hit_prob_zero_before(const ModelParams& p, double x, double b);

/// E_x[tau_0] = x / gamma.
double expected_absorption_time(const ModelParams& p, double x);

/// Probability that a driftless Brownian bridge of variance dt between
/// a > 0 and b > 0 touches the level 0: exp(-2ab/dt).
double bridge_hit_probability(double a, double b, double dt);

/// r_{k+1} = r_k - gamma dt + sqrt(dt) N(0,1), killed at the first grid
/// crossing of 0 or at a bridge hit. One normal and one uniform are consumed
/// per step whether or not the bridge test is enabled.
RadialPath sample_absorbed_path(const ModelParams& p, double x0, const SimConfig& cfg, Stream& rng);

enum class ExitSide { zero, upper, none };

/// Runs the absorbed scheme between 0 and an upper barrier b (both with the
/// bridge test when enabled) until one is hit or t_max elapses.
ExitSide sample_exit_side(const ModelParams& p, double x0, double b, const SimConfig& cfg, Stream& rng);

/// Symmetrized Euler: proposal y = r_k - gamma dt + sqrt(dt) N, r_{k+1} = |y|,
/// regulator increment r_{k+1} - y = 2 max(0, -y). Never absorbed.
RadialPath sample_reflected_path(const ModelParams& p, double x0, const SimConfig& cfg, Stream& rng);

/// Only the endpoint of the reflected scheme; same random consumption as
/// sample_reflected_path, without storing the trajectory.
struct ReflectedEnd {
    double value = 0.0;
    double regulator = 0.0;
};
ReflectedEnd run_reflected(const ModelParams& p, double x0, double dt, std::size_t steps, Stream& rng);

struct LocalTimeEstimate {
    double value = 0.0;
    /// band < sqrt(dt): the boundary layer is not resolved by the grid.
    bool under_resolved = false;
};

/// (1/(2 band)) dt #{k < n-1 : values[k] < band}.
LocalTimeEstimate occupation_local_time(const RadialPath& path, double band);

/// Default boundary band 10 sqrt(dt).
double default_band(double dt);

/// Exact Exp(2 gamma) draw by inversion; strictly positive.
double stationary_sampler(const ModelParams& p, Stream& rng);

}  // namespace sdlab::radial
