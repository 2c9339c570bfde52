#include "sdlab/approx.hpp"

#include <algorithm>
#include <cmath>

#include "sdlab/error.hpp"
#include "sdlab/sphere.hpp"
#include "sdlab/stats.hpp"

namespace sdlab::approx {

TruncParams::TruncParams(ModelParams base, std::size_t n)
    : base_(base), n_(n), cutoff_(0.0), plateau_(0.0) {
    if (n < 1) throw DomainError("TruncParams: n must be >= 1");
    cutoff_ = 1.0 / static_cast<double>(n);
    plateau_ = model::psi_radial(base_, cutoff_);
}

double psi_n_eval(const TruncParams& tp, const Vec3& x) {
    const double r = x.norm();
    return r >= tp.cutoff() ? model::psi_radial(tp.base(), r) : tp.plateau();
}

Vec3 drift_n(const TruncParams& tp, const Vec3& x) {
    const double r = x.norm();
    if (r < tp.cutoff()) return Vec3{};
    return model::drift_eval(tp.base(), x);
}

namespace {

// Mass of psi^n(x)^2 dx inside the cutoff ball, relative to e^{-2 gamma delta}.
double inner_weight(const TruncParams& tp) { return 2.0 * tp.base().gamma() * tp.cutoff() / 3.0; }

}  // namespace

double xn_mass(const TruncParams& tp) {
    const double g = tp.base().gamma();
    return std::exp(-2.0 * g * tp.cutoff()) * (1.0 + inner_weight(tp));
}

double xn_radial_density(const TruncParams& tp, double r) {
    if (r < 0.0) return 0.0;
    const double g = tp.base().gamma();
    const double d = tp.cutoff();
    const double z = 1.0 + inner_weight(tp);
    if (r < d) return 2.0 * g * r * r / (d * d) / z;
    return 2.0 * g * std::exp(-2.0 * g * (r - d)) / z;
}

double xn_radial_cdf(const TruncParams& tp, double r) {
    if (r <= 0.0) return 0.0;
    const double g = tp.base().gamma();
    const double d = tp.cutoff();
    const double w = inner_weight(tp);
    const double z = 1.0 + w;
    if (r < d) return w * (r / d) * (r / d) * (r / d) / z;
    return (w - std::expm1(-2.0 * g * (r - d))) / z;
}

Vec3 xn_stationary_sample(const TruncParams& tp, Stream& rng) {
    const double w = inner_weight(tp);
    const double pick = rng.uniform();
    const double u = rng.uniform();
    const double r = pick < w / (1.0 + w) ? tp.cutoff() * std::cbrt(u)
                                           : tp.cutoff() - std::log(u) / (2.0 * tp.base().gamma());
    return sphere::uniform_point(rng).unit() * r;
}

namespace {

struct Stepper {
    const TruncParams& tp;
    const XnOptions& opts;
    Stream& rng;
    Vec3 x;
    double variation = 0.0;
    std::size_t substeps = 0;

    // Advances by exactly `span` of time.
    void advance(double span) {
        double left = span;
        while (left > 0.0) {
            const double r = x.norm();
            const double scale = std::max(r, tp.cutoff());
            double h = std::min(left, opts.kappa * scale * scale);
            // Avoid a sliver step from round-off at the end of the interval.
            if (left - h < 1e-12 * span) h = left;
            const Vec3 b = drift_n(tp, x);
            variation += b.norm() * h;
            const double sd = std::sqrt(h);
            const double g1 = rng.normal();
            const double g2 = rng.normal();
            const double g3 = rng.normal();
            x += b * h + Vec3{g1, g2, g3} * sd;
            left -= h;
            ++substeps;
        }
    }
};

}  // namespace

XnEnd simulate_xn(const TruncParams& tp, const Vec3& x0, double t_max, double dt, Stream& rng,
                  const XnOptions& opts) {
    if (!(dt > 0.0) || !(t_max >= dt)) throw DomainError("simulate_xn: need 0 < dt <= t_max");
    if (!(opts.kappa > 0.0)) throw DomainError("simulate_xn: kappa must be positive");
    const auto steps = static_cast<std::size_t>(std::llround(t_max / dt));
    Stepper s{tp, opts, rng, x0};
    for (std::size_t k = 0; k < steps; ++k) s.advance(dt);
    return {s.x, s.variation, s.substeps};
}

skewprod::PathR3 sample_xn_path(const TruncParams& tp, const Vec3& x0, const radial::SimConfig& cfg, Stream& rng,
                                const XnOptions& opts) {
    cfg.validate();
    if (!(opts.kappa > 0.0)) throw DomainError("sample_xn_path: kappa must be positive");
    const std::size_t steps = cfg.steps();
    skewprod::PathR3 path;
    path.dt = cfg.dt;
    path.points.reserve(steps + 1);
    path.segment.assign(steps + 1, 0);
    path.points.push_back(x0);
    Stepper s{tp, opts, rng, x0};
    for (std::size_t k = 0; k < steps; ++k) {
        s.advance(cfg.dt);
        path.points.push_back(s.x);
    }
    return path;
}

double compare_radial_law(std::span<const double> x_radii, std::span<const double> xn_radii) {
    if (x_radii.size() != xn_radii.size()) throw SampleSizeError("compare_radial_law: sample sizes differ");
    if (x_radii.size() < 1000) throw SampleSizeError("compare_radial_law: need at least 1000 samples each");
    return stats::ks_two_sample(x_radii, xn_radii);
}

}  // namespace sdlab::approx
