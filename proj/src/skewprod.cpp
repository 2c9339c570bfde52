#include "sdlab/skewprod.hpp"

#include <cmath>
#include <limits>

#include "sdlab/error.hpp"

namespace sdlab::skewprod {

namespace {

double inverse_square(double r) { return r > 0.0 ? 1.0 / (r * r) : std::numeric_limits<double>::infinity(); }

constexpr double absorption_warning_level = 1e-3;

}  // namespace

TimeChange time_change(const radial::RadialPath& path, double cap) {
    if (path.values.size() < 2) throw DomainError("time_change: path needs at least two grid points");
    if (!(cap > 0.0)) throw DomainError("time_change: cap must be positive");
    TimeChange tc;
    tc.dt = path.dt;
    tc.A.resize(path.values.size());
    tc.A[0] = 0.0;
    double prev = inverse_square(path.values[0]);
    for (std::size_t k = 0; k + 1 < path.values.size(); ++k) {
        const double next = inverse_square(path.values[k + 1]);
        double inc = 0.5 * path.dt * (prev + next);
        if (inc > cap) {
            inc = cap;
            tc.capped.push_back(k);
        }
        tc.A[k + 1] = tc.A[k] + inc;
        prev = next;
    }
    return tc;
}

PathR3 assemble_x0(const radial::RadialPath& radial, const TimeChange& tc, const sphere::SpherePoint& start,
                   const sphere::SpherePathOptions& opts, Stream& rng) {
    if (radial.values.size() != tc.A.size()) throw DomainError("assemble_x0: radial path and time change differ in length");
    const auto theta = sphere::sphere_path(start, tc.A, opts, rng);
    PathR3 out;
    out.dt = radial.dt;
    out.points.resize(radial.values.size());
    out.segment.assign(radial.values.size(), 0);
    for (std::size_t k = 0; k < radial.values.size(); ++k) {
        const double r = radial.values[k];
        if (r > 0.0) {
            out.points[k] = theta.points[k].unit() * r;
        } else {
            out.points[k] = Vec3{};
            out.zero_hits.push_back(k);
            out.segment[k] = -1;
        }
    }
    return out;
}

Vec3 sample_x0_endpoint(const ModelParams& p, const Vec3& x, double h, const SmallTimeOptions& opts, Stream& rng,
                        bool& absorbed) {
    const double r0 = x.norm();
    if (!(r0 > 0.0)) throw SingularPointError("sample_x0_endpoint: start at the origin");
    if (opts.substeps < 1) throw DomainError("sample_x0_endpoint: substeps must be >= 1");
    radial::SimConfig cfg;
    cfg.dt = h / static_cast<double>(opts.substeps);
    cfg.t_max = h;
    Stream radial_rng = rng.child(0);
    Stream sphere_rng = rng.child(1);
    const auto path = radial::sample_absorbed_path(p, r0, cfg, radial_rng);
    absorbed = path.absorbed;
    if (absorbed) return Vec3{};
    const auto tc = time_change(path);
    const auto theta = sphere::sphere_path(sphere::SpherePoint(x), tc.A, opts.sphere, sphere_rng);
    return theta.points.back().unit() * path.values.back();
}

DriftEstimate drift_statistic(const ModelParams& p, const Vec3& x, double h, std::size_t n, std::uint64_t seed,
                              const SmallTimeOptions& opts, Execution exec) {
    if (!(x.norm() > 0.0)) throw SingularPointError("drift_statistic: start at the origin");
    if (!(h > 0.0)) throw DomainError("drift_statistic: h must be positive");
    struct Sample {
        Vec3 end;
        bool absorbed = false;
    };
    const auto samples = map_paths(
        n,
        [&](std::size_t i) {
            Stream rng = Stream::for_path(seed, i);
            Sample s;
            s.end = sample_x0_endpoint(p, x, h, opts, rng, s.absorbed);
            return s;
        },
        exec);
    DriftEstimate est;
    std::size_t dead = 0;
    std::vector<double> buf(n);
    for (std::size_t axis = 0; axis < 3; ++axis) {
        for (std::size_t i = 0; i < n; ++i) buf[i] = (samples[i].end[axis] - x[axis]) / h;
        est.component[axis] = stats::estimate_mean_ci(buf, seed);
    }
    for (const auto& s : samples) dead += s.absorbed ? 1 : 0;
    est.absorbed_fraction = static_cast<double>(dead) / static_cast<double>(n);
    est.absorption_warning = est.absorbed_fraction > absorption_warning_level;
    return est;
}

GeneratorEstimate generator_check(const ModelParams& p, const TestFunction& u, const Vec3& x, double h, std::size_t n,
                                  std::uint64_t seed, const SmallTimeOptions& opts, Execution exec) {
    if (!u.value || !u.gradient || !u.laplacian) throw DomainError("generator_check: incomplete test function");
    if (!(h > 0.0)) throw DomainError("generator_check: h must be positive");
    const double u0 = u.value(x);
    struct Sample {
        double value = 0.0;
        bool absorbed = false;
    };
    const auto samples = map_paths(
        n,
        [&](std::size_t i) {
            Stream rng = Stream::for_path(seed, i);
            Sample s;
            const Vec3 end = sample_x0_endpoint(p, x, h, opts, rng, s.absorbed);
            s.value = s.absorbed ? 0.0 : u.value(end);
            return s;
        },
        exec);
    std::vector<double> buf(n);
    std::size_t dead = 0;
    for (std::size_t i = 0; i < n; ++i) {
        buf[i] = (samples[i].value - u0) / h;
        dead += samples[i].absorbed ? 1 : 0;
    }
    GeneratorEstimate est;
    est.estimate = stats::estimate_mean_ci(buf, seed);
    est.predicted = 0.5 * u.laplacian(x) + dot(model::drift_eval(p, x), u.gradient(x));
    est.absorbed_fraction = static_cast<double>(dead) / static_cast<double>(n);
    est.absorption_warning = est.absorbed_fraction > absorption_warning_level;
    return est;
}

}  // namespace sdlab::skewprod
