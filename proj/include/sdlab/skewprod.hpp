#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "sdlab/ensemble.hpp"
#include "sdlab/radial.hpp"
#include "sdlab/sphere.hpp"
#include "sdlab/stats.hpp"
#include "sdlab/vec3.hpp"

namespace sdlab::skewprod {

using model::ModelParams;

/// A_t = int_0^t r_s^-2 ds on the grid of a RadialPath (midpoint rule).
/// Steps k -> k+1 whose increment exceeded the cap are listed in `capped`.
struct TimeChange {
    double dt = 0.0;
    std::vector<double> A;
    std::vector<std::size_t> capped;
};

/// A trajectory in R^3 on a uniform grid. Indices listed in `zero_hits` sit at
/// the origin; `segment[k]` names the piece of the construction index k came
/// from (-1 at zeros, 0 for the initial X^0 segment, excursion number + 1).
struct PathR3 {
    double dt = 0.0;
    std::vector<Vec3> points;
    std::vector<std::size_t> zero_hits;
    std::vector<std::int64_t> segment;

    std::size_t size() const { return points.size(); }
};

constexpr double default_cap = 10.0;

/// Throws DomainError for paths with fewer than two points.
TimeChange time_change(const radial::RadialPath& path, double cap = default_cap);

/// X^0_k = r_k theta_{A_k}, theta a sphere BM started at `start`. The path ends
/// at the radial lifetime; an absorbed endpoint is the origin.
PathR3 assemble_x0(const radial::RadialPath& radial, const TimeChange& tc, const sphere::SpherePoint& start,
                   const sphere::SpherePathOptions& opts, Stream& rng);

struct SmallTimeOptions {
    /// Radial grid steps per horizon h.
    std::size_t substeps = 10;
    sphere::SpherePathOptions sphere;
};

/// X^0_h started at x via the skew product. `absorbed` reports death before h;
/// the killed state contributes the origin.
Vec3 sample_x0_endpoint(const ModelParams& p, const Vec3& x, double h, const SmallTimeOptions& opts, Stream& rng,
                        bool& absorbed);

struct DriftEstimate {
    std::array<stats::EstimateWithCI, 3> component;
    double absorbed_fraction = 0.0;
    /// More than 0.1% of paths died before h.
    bool absorption_warning = false;
};

/// (E[X^0_h] - x)/h by Monte Carlo; matches drift_eval(x) up to O(h).
DriftEstimate drift_statistic(const ModelParams& p, const Vec3& x, double h, std::size_t n, std::uint64_t seed,
                              const SmallTimeOptions& opts = {}, Execution exec = Execution::parallel);

/// Caller-supplied smooth test function, its gradient and Laplacian.
struct TestFunction {
    std::function<double(const Vec3&)> value;
    std::function<Vec3(const Vec3&)> gradient;
    std::function<double(const Vec3&)> laplacian;
};

struct GeneratorEstimate {
    stats::EstimateWithCI estimate;
    /// (1/2) Lap u(x) + grad log psi(x) . grad u(x).
    double predicted = 0.0;
    double absorbed_fraction = 0.0;
    bool absorption_warning = false;
};

/// (E[u(X^0_h)] - u(x))/h. Killed paths contribute u = 0 (test functions are
/// supported away from the origin).
GeneratorEstimate generator_check(const ModelParams& p, const TestFunction& u, const Vec3& x, double h, std::size_t n,
                                  std::uint64_t seed, const SmallTimeOptions& opts = {},
                                  Execution exec = Execution::parallel);

}  // namespace sdlab::skewprod
