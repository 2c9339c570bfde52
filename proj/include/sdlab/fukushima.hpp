#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sdlab/approx.hpp"
#include "sdlab/ensemble.hpp"
#include "sdlab/skewprod.hpp"
#include "sdlab/stats.hpp"

namespace sdlab::fukushima {

using model::ModelParams;

/// N_t = int_0^t grad log psi(X_s) ds along `path` by the trapezoidal rule, one
/// value per grid index up to round(upto / dt). Throws SingularPointError if
/// the path touches the origin in that range.
std::vector<Vec3> zero_energy_integral(const ModelParams& p, const skewprod::PathR3& path, double upto);

/// Lebesgue density of the i-th component (0-based) of the signed measure
/// grad_i log psi(x) m(dx).
double signed_measure_density(const ModelParams& p, const Vec3& x, std::size_t i);

/// int_{|x| > delta} |grad log psi| dm, by quadrature in log r.
double truncated_mass(const ModelParams& p, double delta);

struct VariationConfig {
    double dt = 1e-3;
    std::size_t n_paths = 4000;
    std::uint64_t seed = 0;
    approx::XnOptions xn;
};

struct VariationReport {
    std::vector<std::size_t> n_grid;
    std::vector<stats::EstimateWithCI> tv_estimates;
    /// Exact stationary expectation T * E[|drift_n(X^n)|] per level.
    std::vector<double> expected;
    double fitted_slope = 0.0;
    double slope_stderr = 0.0;
    /// Slope of `expected` against ln n over the same grid.
    double expected_slope = 0.0;
    double target_slope = 0.0;
    double T = 0.0;
    VariationConfig config;
};

/// For each n, E[int_0^T |drift_n(X^n_s)| ds] from stationary starts, and the
/// least-squares slope of these against ln n. Throws DomainError if n_grid is not
/// strictly increasing or has fewer than two entries, SampleSizeError if
/// n_paths < 2.
VariationReport total_variation_report(const ModelParams& p, double T, const std::vector<std::size_t>& n_grid,
                                       const VariationConfig& cfg, Execution exec = Execution::parallel);

}  // namespace sdlab::fukushima
