#include "sdlab/fukushima.hpp"

#include <cmath>

#include "sdlab/error.hpp"
#include "sdlab/quadrature.hpp"

namespace sdlab::fukushima {

std::vector<Vec3> zero_energy_integral(const ModelParams& p, const skewprod::PathR3& path, double upto) {
    if (path.points.empty()) throw DomainError("zero_energy_integral: empty path");
    if (!(upto >= 0.0)) throw DomainError("zero_energy_integral: upto must be >= 0");
    const auto last = std::min<std::size_t>(static_cast<std::size_t>(std::llround(upto / path.dt)), path.size() - 1);
    std::vector<Vec3> N(last + 1);
    Vec3 prev = model::drift_eval(p, path.points[0]);
    for (std::size_t k = 1; k <= last; ++k) {
        const Vec3 next = model::drift_eval(p, path.points[k]);
        N[k] = N[k - 1] + (prev + next) * (0.5 * path.dt);
        prev = next;
    }
    return N;
}

double signed_measure_density(const ModelParams& p, const Vec3& x, std::size_t i) {
    if (i > 2) throw DomainError("signed_measure_density: coordinate index must be 0, 1 or 2");
    const double psi = model::psi_eval(p, x);
    return model::drift_eval(p, x)[i] * psi * psi;
}

double truncated_mass(const ModelParams& p, double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("truncated_mass: delta must be positive");
    const double g = p.gamma();
    // Beyond delta + 40/gamma the integrand is below e^{-80} relative to its peak.
    const double upper = delta + 40.0 / g;
    const auto integrand = [g](double s) {
        const double r = std::exp(s);
        return (g * r + 1.0) * 2.0 * g * std::exp(-2.0 * g * r);
    };
    return quad::integrate(integrand, std::log(delta), std::log(upper), 1e-10).value;
}

VariationReport total_variation_report(const ModelParams& p, double T, const std::vector<std::size_t>& n_grid,
                                       const VariationConfig& cfg, Execution exec) {
    if (n_grid.size() < 2) throw DomainError("total_variation_report: need at least two truncation levels");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 1) throw DomainError("total_variation_report: levels must be >= 1");
        if (i > 0 && n_grid[i] <= n_grid[i - 1])
            throw DomainError("total_variation_report: levels must be strictly increasing");
    }
    if (cfg.n_paths < 2) throw SampleSizeError("total_variation_report: need at least two paths per level");
    if (!(T >= cfg.dt) || !(cfg.dt > 0.0)) throw DomainError("total_variation_report: need 0 < dt <= T");

    VariationReport rep;
    rep.n_grid = n_grid;
    rep.T = T;
    rep.config = cfg;
    rep.target_slope = 2.0 * p.gamma() * T;
    std::vector<double> log_n, means, errs;
    for (std::size_t level = 0; level < n_grid.size(); ++level) {
        const approx::TruncParams tp(p, n_grid[level]);
        const auto tv = map_paths(
            cfg.n_paths,
            [&](std::size_t i) {
                Stream rng = Stream::for_path(cfg.seed, i).child(n_grid[level]);
                Stream start_rng = rng.child(0);
                Stream path_rng = rng.child(1);
                const Vec3 x0 = approx::xn_stationary_sample(tp, start_rng);
                return approx::simulate_xn(tp, x0, T, cfg.dt, path_rng, cfg.xn).variation;
            },
            exec);
        rep.tv_estimates.push_back(stats::estimate_mean_ci(tv, cfg.seed));
        rep.expected.push_back(T * truncated_mass(p, tp.cutoff()) / approx::xn_mass(tp));
        log_n.push_back(std::log(static_cast<double>(n_grid[level])));
        means.push_back(rep.tv_estimates.back().mean);
        errs.push_back(rep.tv_estimates.back().stderr());
    }
    const auto fit = stats::ols_fit(log_n, means, errs);
    rep.fitted_slope = fit.slope;
    rep.slope_stderr = fit.slope_stderr;
    rep.expected_slope = stats::linear_fit(log_n, rep.expected).slope;
    return rep;
}

}  // namespace sdlab::fukushima
