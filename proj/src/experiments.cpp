#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "experiment_context.hpp"
#include "sdlab/approx.hpp"
#include "sdlab/error.hpp"
#include "sdlab/excursion.hpp"
#include "sdlab/fukushima.hpp"
#include "sdlab/io.hpp"
#include "sdlab/model.hpp"

namespace sdlab::harness::detail {

namespace {

bool evaluate(const Check& c) {
    if (!std::isfinite(c.value)) return false;
    if (c.relation == "abs_le") return std::abs(c.value - c.target) <= c.tolerance;
    if (c.relation == "lt") return c.value < c.target;
    if (c.relation == "le") return c.value <= c.target;
    if (c.relation == "gt") return c.value > c.target;
    if (c.relation == "ge") return c.value >= c.target;
    if (c.relation == "eq") return c.value == c.target;
    throw std::logic_error("unknown relation " + c.relation);
}

}  // namespace

Check Context::make(std::string name, double value, double target, double tol, std::string relation) {
    Check c;
    c.name = std::move(name);
    c.value = value;
    c.target = target;
    c.tolerance = tol;
    c.relation = std::move(relation);
    c.pass = evaluate(c);
    return c;
}

void Context::add(Check c, bool statistical) {
    c.criterion = report_.criterion;
    c.enforced = !(statistical && report_.underpowered);
    report_.checks.push_back(std::move(c));
}

void Context::close(const std::string& name, double value, double target, double tol, bool statistical) {
    add(make(name, value, target, tol, "abs_le"), statistical);
}
void Context::less(const std::string& name, double value, double bound, bool statistical) {
    add(make(name, value, bound, 0.0, "lt"), statistical);
}
void Context::at_least(const std::string& name, double value, double bound, bool statistical) {
    add(make(name, value, bound, 0.0, "ge"), statistical);
}
void Context::greater(const std::string& name, double value, double bound, bool statistical) {
    add(make(name, value, bound, 0.0, "gt"), statistical);
}
void Context::covers(const std::string& name, const stats::EstimateWithCI& est, double target, double slack) {
    add(make(name, est.mean, target, 3.0 * est.stderr() + slack, "abs_le"), true);
}
void Context::equal(const std::string& name, bool value, bool expected) {
    add(make(name, value ? 1.0 : 0.0, expected ? 1.0 : 0.0, 0.0, "eq"), false);
}
void Context::supplementary(Check c) {
    c.criterion = report_.criterion;
    c.enforced = false;
    report_.checks.push_back(std::move(c));
}

namespace {

using model::ModelParams;
using nlohmann::json;

json estimate(const stats::EstimateWithCI& e) { return io::to_json(e); }

radial::SimConfig sim_config(const Resolved& cfg) {
    radial::SimConfig sc;
    sc.dt = cfg.dt;
    sc.t_max = cfg.t_max;
    sc.n_paths = cfg.n_paths;
    sc.seed = cfg.seed;
    return sc;
}

// 1 ------------------------------------------------------------------------

void run_capacity(Context& ctx) {
    const ModelParams p(ctx.cfg.gamma);
    const double g = p.gamma();
    // Direct evaluation of the root and the ratio, without the cancellation-free
    // rewrite used by ModelParams.
    const double c = g - std::sqrt(g * g + 2.0);
    const double closed = (g + g * c * c) / (g - c);
    const double cap = model::capacity_origin(p);
    ctx.result("capacity", cap);
    ctx.result("capacity_closed_form", closed);
    ctx.close("capacity_origin vs (g + g c^2)/(g - c)", cap, closed, 1e-6);

    const ModelParams p1(1.0);
    ctx.close("capacity_origin(gamma=1) vs 0.8867513", model::capacity_origin(p1), 0.8867513459481288, 1e-6);

    std::vector<double> gammas{0.5, 1.0, 2.0};
    if (std::find(gammas.begin(), gammas.end(), g) == gammas.end()) gammas.push_back(g);
    const std::vector<double> eps_grid{0.05, 0.1, 0.5, 1.0, 2.0};
    double worst = 0.0;
    json grid = json::array();
    for (double gg : gammas) {
        const ModelParams q(gg);
        for (double eps : eps_grid) {
            const double cf = model::energy_e1(q, eps, model::EnergyMode::closed_form);
            const double qd = model::energy_e1(q, eps, model::EnergyMode::quadrature);
            worst = std::max(worst, std::abs(cf - qd));
            // The same potential measured with the 1/2 on the gradient term.
            const double half_form = 1.0 - std::exp(-2.0 * gg * eps) * (1.0 + gg * q.c());
            grid.push_back({{"gamma", gg}, {"eps", eps}, {"closed_form", cf}, {"quadrature", qd},
                            {"half_gradient_form", half_form}});
        }
    }
    ctx.result("energy_grid", grid);
    ctx.less("max |energy_e1 quadrature - closed form| on (gamma, eps) grid", worst, 1e-8);
}

// 2 ------------------------------------------------------------------------

void run_eigen(Context& ctx) {
    const double h = ctx.cfg.dt;
    json per_gamma = json::object();
    for (double g : {0.5, 1.0, 2.0}) {
        const ModelParams p(g);
        double worst = 0.0;
        for (int i = 0; i <= 990; ++i) {
            const double r = 0.1 + 0.01 * i;
            worst = std::max(worst, std::abs(model::eigen_residual(p, r, h)));
        }
        per_gamma[io::format_double(g)] = worst;
        ctx.less("max residual on [0.1, 10], gamma=" + io::format_double(g), worst, 1e-5);
    }
    ctx.result("max_residual", per_gamma);

    // Second-order consistency: halving h divides the truncation error by ~4.
    const ModelParams p(1.0);
    const double coarse = std::abs(model::eigen_residual(p, 0.5, 2e-2));
    const double fine = std::abs(model::eigen_residual(p, 0.5, 1e-2));
    ctx.result("h_ratio", coarse / fine);
    ctx.supplementary(Context::make("residual ratio h=2e-2 vs 1e-2 at r=0.5", coarse / fine, 4.0, 0.4, "abs_le"));
}

// 3 ------------------------------------------------------------------------

void run_radial_absorb(Context& ctx) {
    const ModelParams p(ctx.cfg.gamma);
    const auto sc = sim_config(ctx.cfg);
    const double x0 = 1.0;
    const std::size_t n = ctx.cfg.n_paths;
    const auto s_abs = ctx.seed(1);
    struct Out {
        double tau = 0.0;
        bool absorbed = false;
    };
    const auto out = map_paths(
        n,
        [&](std::size_t i) {
            Stream rng = Stream::for_path(s_abs, i);
            const auto path = radial::sample_absorbed_path(p, x0, sc, rng);
            return Out{path.absorbed ? *path.absorption_time() : sc.t_max, path.absorbed};
        },
        ctx.exec);
    std::vector<double> tau(n);
    std::size_t absorbed = 0;
    for (std::size_t i = 0; i < n; ++i) {
        tau[i] = out[i].tau;
        absorbed += out[i].absorbed ? 1 : 0;
    }
    const double frac = static_cast<double>(absorbed) / static_cast<double>(n);
    if (absorbed < n) ctx.warn("some paths survived to t_max; their absorption time is censored at t_max");
    const double target = radial::expected_absorption_time(p, x0);
    const auto est = stats::estimate_mean_ci(tau, s_abs);
    ctx.result("tau_mean", estimate(est));
    ctx.result("tau_target", target);
    ctx.result("absorbed_fraction", frac);
    ctx.covers("mean absorption time within 3 s.e. of x/gamma", est, target);
    ctx.less("relative error of mean absorption time", std::abs(est.mean - target) / target, 0.02, true);
    ctx.supplementary(Context::make("absorbed fraction by t_max", frac, 0.999, 0.0, "gt"));

    const double xe = std::numbers::ln2 / (2.0 * p.gamma());
    const double b = std::numbers::ln2 / p.gamma();
    const double pe = radial::hit_prob_zero_before(p, xe, b);
    ctx.close("exit formula at x=ln2/(2g), b=ln2/g equals 2/3", pe, 2.0 / 3.0, 1e-12);
    const auto s_exit = ctx.seed(2);
    const auto sides = map_paths(
        n,
        [&](std::size_t i) {
            Stream rng = Stream::for_path(s_exit, i);
            return radial::sample_exit_side(p, xe, b, sc, rng);
        },
        ctx.exec);
    std::vector<double> hit0(n);
    std::size_t undecided = 0;
    for (std::size_t i = 0; i < n; ++i) {
        hit0[i] = sides[i] == radial::ExitSide::zero ? 1.0 : 0.0;
        undecided += sides[i] == radial::ExitSide::none ? 1 : 0;
    }
    if (undecided > 0) ctx.warn("some exit-side paths reached t_max without exiting");
    const auto pe_mc = stats::estimate_mean_ci(hit0, s_exit);
    ctx.result("exit_probability", estimate(pe_mc));
    ctx.covers("hit-0-before-b frequency within 3 s.e. of 2/3", pe_mc, pe);

    Stream rng = Stream::for_path(s_abs, 0);
    ctx.artifact({"radial_absorbed_path", radial::sample_absorbed_path(p, x0, sc, rng)});
}

// 4 ------------------------------------------------------------------------

void run_radial_stationary(Context& ctx) {
    const ModelParams p(ctx.cfg.gamma);
    const auto sc = sim_config(ctx.cfg);
    const std::size_t n = ctx.cfg.n_paths;
    const double x0 = 1.0;
    const auto s = ctx.seed(1);
    const auto ends = map_paths(
        n,
        [&](std::size_t i) {
            Stream rng = Stream::for_path(s, i);
            return radial::run_reflected(p, x0, sc.dt, sc.steps(), rng).value;
        },
        ctx.exec);
    const double ks = stats::ks_statistic(ends, [&](double r) { return model::m_radial_cdf(p, r); });
    ctx.result("ks_distance", ks);
    ctx.result("ks_pvalue", stats::ks_pvalue(ks, static_cast<double>(n)));
    ctx.result("samples", n);
    ctx.less("KS(reflected endpoint, Exp(2 gamma))", ks, 0.02, true);
    const auto mean = stats::estimate_mean_ci(ends, s);
    ctx.result("mean", estimate(mean));
    Check c = Context::make("endpoint mean vs 1/(2 gamma)", mean.mean, 0.5 / p.gamma(), 3.0 * mean.stderr(), "abs_le");
    ctx.supplementary(c);

    Stream rng = Stream::for_path(s, 0);
    ctx.artifact({"reflected_path", radial::sample_reflected_path(p, x0, sc, rng)});
}

void run_regulator(Context& ctx) {
    const ModelParams p(ctx.cfg.gamma);
    const auto sc = sim_config(ctx.cfg);
    const std::size_t n = ctx.cfg.n_paths;
    const double T = sc.dt * static_cast<double>(sc.steps());
    const double band = radial::default_band(sc.dt);
    const auto s = ctx.seed(1);
    struct Out {
        double regulator = 0.0;
        double occupation = 0.0;
        double occupation_half = 0.0;
    };
    const auto out = map_paths(
        n,
        [&](std::size_t i) {
            Stream rng = Stream::for_path(s, i);
            Stream start = rng.child(0);
            Stream run = rng.child(1);
            const double x0 = radial::stationary_sampler(p, start);
            const auto path = radial::sample_reflected_path(p, x0, sc, run);
            return Out{path.regulator->back() / T, radial::occupation_local_time(path, band).value / T,
                       radial::occupation_local_time(path, 0.5 * band).value / T};
        },
        ctx.exec);
    std::vector<double> reg(n), occ(n), occ_half(n);
    for (std::size_t i = 0; i < n; ++i) {
        reg[i] = out[i].regulator;
        occ[i] = out[i].occupation;
        occ_half[i] = out[i].occupation_half;
    }
    const auto reg_e = stats::estimate_mean_ci(reg, s);
    const auto occ_e = stats::estimate_mean_ci(occ, s);
    const auto occ_half_e = stats::estimate_mean_ci(occ_half, s);
    const double g = p.gamma();
    ctx.result("regulator_rate", estimate(reg_e));
    ctx.result("occupation_rate", estimate(occ_e));
    ctx.result("occupation_rate_half_band", estimate(occ_half_e));
    ctx.result("band", band);
    ctx.result("regulator_over_occupation", reg_e.mean / occ_e.mean);
    // Rate of l^0 if the regulator is read as pi*gamma*l^0.
    ctx.result("implied_l0_rate_pi_gamma_convention", reg_e.mean / (std::numbers::pi * g));
    ctx.less("relative error of regulator rate vs gamma", std::abs(reg_e.mean - g) / g, 0.05, true);
    ctx.supplementary(
        Context::make("occupation rate relative error vs gamma", std::abs(occ_e.mean - g) / g, 0.10, 0.0, "lt"));
    ctx.supplementary(Context::make("occupation rate change when halving band", std::abs(occ_half_e.mean / occ_e.mean - 1.0),
                                    0.05, 0.0, "lt"));
}

// 5 ------------------------------------------------------------------------

void run_sphere_mixing(Context& ctx) {
    const std::size_t n = ctx.cfg.n_paths;
    sphere::SpherePathOptions opts;
    opts.max_substep = ctx.cfg.dt;
    const std::vector<double> grid{0.0, 0.5, 1.0, 2.0};
    const auto s_corr = ctx.seed(1);
    const auto dots = map_paths(
        n,
        [&](std::size_t i) {
            Stream rng = Stream::for_path(s_corr, i);
            const auto path = sphere::sphere_path(std::nullopt, grid, opts, rng);
            std::array<double, 3> d{};
            for (std::size_t k = 1; k < grid.size(); ++k) d[k - 1] = dot(path.points[k].unit(), path.points[0].unit());
            return d;
        },
        ctx.exec);
    json corr = json::object();
    for (std::size_t k = 1; k < grid.size(); ++k) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = dots[i][k - 1];
        const auto e = stats::estimate_mean_ci(v, s_corr);
        corr[io::format_double(grid[k])] = estimate(e);
        ctx.covers("E[theta_t . theta_0] vs exp(-t) at t=" + io::format_double(grid[k]), e, std::exp(-grid[k]));
    }
    ctx.result("correlation", corr);

    const double horizon = ctx.cfg.t_max;
    if (horizon >= opts.stationarity_threshold)
        ctx.warn("uniformity horizon at or above the stationarity threshold tests the uniform shortcut only");
    const auto s_unif = ctx.seed(2);
    const std::vector<double> ugrid{0.0, horizon};
    const sphere::SpherePoint north(Vec3{0.0, 0.0, 1.0});
    const auto ends = map_paths(
        n,
        [&](std::size_t i) {
            Stream rng = Stream::for_path(s_unif, i);
            return sphere::sphere_path(north, ugrid, opts, rng).points.back();
        },
        ctx.exec);
    const auto hist = sphere::cell_histogram(ends, 48);
    const auto chi = stats::chi_square_uniform(hist);
    ctx.result("uniformity_horizon", horizon);
    ctx.result("uniformity_chi_square", {{"statistic", chi.statistic}, {"dof", chi.dof}, {"p_value", chi.p_value}});
    ctx.greater("uniformity chi-square p-value (48 cells) from a fixed start", chi.p_value, 0.01, true);

    std::vector<double> fine;
    for (int k = 0; k <= 200; ++k) fine.push_back(0.01 * k);
    Stream rng = Stream::for_path(s_corr, 0);
    ctx.artifact({"sphere_path", sphere::sphere_path(north, fine, opts, rng)});
}

// 6 ------------------------------------------------------------------------

void run_x0_drift(Context& ctx) {
    const ModelParams p(ctx.cfg.gamma);
    const double h = ctx.cfg.dt;
    const std::size_t n = ctx.cfg.n_paths;
    json res = json::object();
    std::uint64_t tag = 1;
    for (const Vec3 x : {Vec3{1.0, 0.0, 0.0}, Vec3{0.0, 1.0, 0.0}}) {
        const auto s = ctx.seed(tag++);
        const auto est = skewprod::drift_statistic(p, x, h, n, s, {}, ctx.exec);
        const Vec3 target = model::drift_eval(p, x);
        const double slack = 0.5 * h * model::drift_generator(p, x).norm();
        const std::string at = "(" + io::format_double(x.x) + "," + io::format_double(x.y) + "," +
                               io::format_double(x.z) + ")";
        json comp = json::array();
        for (std::size_t i = 0; i < 3; ++i) {
            comp.push_back(estimate(est.component[i]));
            ctx.covers("drift component " + std::to_string(i) + " at x=" + at + " (3 s.e. + h/2 |A b|)",
                       est.component[i], target[i], slack);
        }
        res[at] = {{"estimate", comp},
                   {"target", {target.x, target.y, target.z}},
                   {"bias_bound", slack},
                   {"absorbed_fraction", est.absorbed_fraction}};
        if (est.absorption_warning) ctx.warn("more than 0.1% of paths absorbed before h at x=" + at);
    }
    ctx.result("drift", res);
    ctx.result("h", h);
}

void run_x0_generator(Context& ctx) {
    const ModelParams p(ctx.cfg.gamma);
    const double g = p.gamma();
    const double h = ctx.cfg.dt;
    const std::size_t n = ctx.cfg.n_paths;
    const Vec3 x{1.0, 0.0, 0.0};
    struct Case {
        std::string name;
        skewprod::TestFunction u;
        double bias;
    };
    std::vector<Case> cases;
    cases.push_back({"|x|^2",
                     {[](const Vec3& y) { return y.norm2(); }, [](const Vec3& y) { return y * 2.0; },
                      [](const Vec3&) { return 6.0; }},
                     // A(Au) = 2 gamma^2 for u = |x|^2.
                     h * g * g});
    cases.push_back({"x_1",
                     {[](const Vec3& y) { return y.x; }, [](const Vec3&) { return Vec3{1.0, 0.0, 0.0}; },
                      [](const Vec3&) { return 0.0; }},
                     0.5 * h * std::abs(model::drift_generator(p, x).x)});
    cases.push_back({"1",
                     {[](const Vec3&) { return 1.0; }, [](const Vec3&) { return Vec3{}; },
                      [](const Vec3&) { return 0.0; }},
                     0.0});
    json res = json::object();
    std::uint64_t tag = 1;
    for (const auto& c : cases) {
        const auto est = skewprod::generator_check(p, c.u, x, h, n, ctx.seed(tag++), {}, ctx.exec);
        res[c.name] = {{"estimate", estimate(est.estimate)}, {"predicted", est.predicted}, {"bias_bound", c.bias}};
        ctx.covers("generator on u=" + c.name + " at (1,0,0)", est.estimate, est.predicted, c.bias);
        if (est.absorption_warning) ctx.warn("more than 0.1% of paths absorbed before h for u=" + c.name);
    }
    ctx.result("generator", res);
}

// 7 ------------------------------------------------------------------------

void run_timechange_blowup(Context& ctx) {
    const ModelParams p(ctx.cfg.gamma);
    const auto sc = sim_config(ctx.cfg);
    const std::size_t n = ctx.cfg.n_paths;
    const std::array<double, 3> deltas{1e-2, 1e-3, 1e-4};
    const auto s = ctx.seed(1);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const auto out = map_paths(
        n,
        [&](std::size_t i) {
            Stream rng = Stream::for_path(s, i);
            const auto path = radial::sample_absorbed_path(p, 1.0, sc, rng);
            std::array<double, 3> a{nan, nan, nan};
            if (!path.absorbed) return a;
            const auto tc = skewprod::time_change(path);
            const auto idx = static_cast<double>(*path.absorption_index);
            for (std::size_t j = 0; j < deltas.size(); ++j) {
                const double k = std::floor(idx - deltas[j] / sc.dt + 1e-9);
                if (k >= 0.0) a[j] = tc.A[static_cast<std::size_t>(k)];
            }
            return a;
        },
        ctx.exec);
    std::array<double, 3> med{};
    std::size_t used = 0;
    for (std::size_t j = 0; j < deltas.size(); ++j) {
        std::vector<double> v;
        for (const auto& a : out)
            if (std::isfinite(a[0]) && std::isfinite(a[2])) v.push_back(a[j]);
        used = v.size();
        med[j] = v.size() >= 2 ? stats::median(v) : nan;
    }
    ctx.result("deltas", deltas);
    ctx.result("median_A", med);
    ctx.result("paths_used", used);
    ctx.result("increment_per_decade", {med[1] - med[0], med[2] - med[1]});
    ctx.result("ratio_1e-4_over_1e-2", med[2] / med[0]);
    if (used < n) ctx.warn("paths absorbed before the largest delta or never absorbed were excluded");
    ctx.equal("median A(tau0 - delta) strictly increasing as delta decreases", med[0] < med[1] && med[1] < med[2],
              true);
    ctx.at_least("median A ratio delta=1e-4 vs delta=1e-2", med[2] / med[0], 10.0, true);
}

// 8 ------------------------------------------------------------------------

void run_x_invariant(Context& ctx) {
    const ModelParams p(ctx.cfg.gamma);
    const auto sc = sim_config(ctx.cfg);
    const std::size_t n = ctx.cfg.n_paths;
    const Vec3 x0{1.0, 0.0, 0.0};
    excursion::AssembleOptions opts;
    opts.stride = sc.steps();
    const auto s = ctx.seed(1);
    const auto radii = map_paths(
        n,
        [&](std::size_t i) {
            Stream rng = Stream::for_path(s, i);
            return excursion::assemble_x(p, x0, sc, rng, opts).points.back().norm();
        },
        ctx.exec);
    const double ks = stats::ks_statistic(radii, [&](double r) { return model::m_radial_cdf(p, r); });
    const auto at_origin = std::count(radii.begin(), radii.end(), 0.0);
    ctx.result("ks_distance", ks);
    ctx.result("ks_pvalue", stats::ks_pvalue(ks, static_cast<double>(n)));
    ctx.result("fraction_at_origin", static_cast<double>(at_origin) / static_cast<double>(n));
    ctx.result("zero_floor", excursion::default_floor(sc.dt));
    ctx.less("KS(|X_T|, Exp(2 gamma))", ks, 0.02, true);

    excursion::AssembleOptions plot;
    plot.stride = std::max<std::size_t>(1, sc.steps() / 1000);
    Stream rng = Stream::for_path(s, 0);
    ctx.artifact({"x_path", excursion::assemble_x(p, x0, sc, rng, plot)});
}

void run_x_regular_origin(Context& ctx) {
    const ModelParams p(ctx.cfg.gamma);
    const auto sc = sim_config(ctx.cfg);
    const std::size_t n = ctx.cfg.n_paths;
    const auto s = ctx.seed(1);
    // [0]: some grid-level zero at t in (0, t_max]; [1]: a zero after the path
    // has first left the origin.
    const auto out = map_paths(
        n,
        [&](std::size_t i) {
            Stream rng = Stream::for_path(s, i);
            const auto path = excursion::assemble_x(p, Vec3{}, sc, rng);
            std::array<double, 2> r{0.0, 0.0};
            bool left = false;
            for (std::size_t k = 1; k < path.size(); ++k) {
                const bool zero = path.points[k] == Vec3{};
                if (zero) r[0] = 1.0;
                if (zero && left) {
                    r[1] = 1.0;
                    break;
                }
                left = left || !zero;
            }
            return r;
        },
        ctx.exec);
    std::vector<double> any(n), strict(n);
    for (std::size_t i = 0; i < n; ++i) {
        any[i] = out[i][0];
        strict[i] = out[i][1];
    }
    const auto frac = stats::estimate_mean_ci(any, s);
    const auto frac_strict = stats::estimate_mean_ci(strict, s);
    ctx.result("return_fraction", estimate(frac));
    ctx.result("leave_and_return_fraction", estimate(frac_strict));
    ctx.result("zero_floor", excursion::default_floor(sc.dt));
    ctx.at_least("fraction of paths from 0 with a grid-level zero in (0, t_max]", frac.mean, 0.99, true);
    ctx.supplementary(Context::make("fraction of paths leaving 0 and returning by t_max", frac_strict.mean, 0.99,
                                    0.0, "ge"));

    // Zeros of X are the sub-floor radial indices, so the dt dependence can be
    // read off the reflected radial part alone.
    json refinement = json::array();
    const std::size_t n_ref = std::min<std::size_t>(n, 2000);
    for (double dt : {1e-3, 1e-4, 1e-5}) {
        if (!(dt < sc.t_max)) continue;
        radial::SimConfig rc = sc;
        rc.dt = dt;
        const double floor = excursion::default_floor(dt);
        const auto s_ref = ctx.seed(10 + static_cast<std::uint64_t>(std::llround(-std::log10(dt))));
        const auto hit = map_paths(
            n_ref,
            [&](std::size_t i) {
                Stream rng = Stream::for_path(s_ref, i);
                const auto path = radial::sample_reflected_path(p, 0.0, rc, rng);
                bool left = false;
                for (std::size_t k = 1; k < path.values.size(); ++k) {
                    const bool zero = path.values[k] < floor;
                    if (zero && left) return 1.0;
                    left = left || !zero;
                }
                return 0.0;
            },
            ctx.exec);
        refinement.push_back({{"dt", dt}, {"leave_and_return_fraction", estimate(stats::estimate_mean_ci(hit, s_ref))}});
    }
    ctx.result("radial_refinement", refinement);
}

// 9 ------------------------------------------------------------------------

void run_excursion_coverage(Context& ctx) {
    const ModelParams p(ctx.cfg.gamma);
    const auto sc = sim_config(ctx.cfg);
    const std::size_t n = ctx.cfg.n_paths;
    const double floor = excursion::default_floor(sc.dt);
    constexpr std::size_t cells = 48;
    constexpr double min_span = 20.0;
    const auto need = static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(cells)));
    excursion::AngularOptions opts;
    opts.track_coverage = true;
    opts.n_cells = cells;
    const auto s = ctx.seed(1);
    const auto per_path = map_paths(
        n,
        [&](std::size_t i) {
            Stream rng = Stream::for_path(s, i);
            Stream radial_rng = rng.child(0);
            const auto path = radial::sample_reflected_path(p, 0.0, sc, radial_rng);
            auto excursions = excursion::extract_excursions(path, floor, i);
            std::vector<excursion::ExcursionRecord> kept;
            for (std::size_t e = 0; e < excursions.size(); ++e) {
                auto& exc = excursions[e];
                Stream exc_rng = rng.child(1).child(e);
                attach_angular(exc, exc_rng, opts);
                if (exc.span_neg >= min_span && exc.span_pos >= min_span) {
                    exc.rho.clear();
                    exc.A_rel.clear();
                    exc.angular = {};
                    exc.angular_index.clear();
                    kept.push_back(std::move(exc));
                }
            }
            return std::make_pair(excursions.size(), std::move(kept));
        },
        ctx.exec);
    std::vector<excursion::ExcursionRecord> qualifying;
    std::size_t total = 0;
    for (auto& [count, recs] : per_path) {
        total += count;
        for (auto& r : recs) qualifying.push_back(std::move(r));
    }
    std::size_t good = 0;
    std::vector<double> cov;
    for (const auto& r : qualifying) {
        good += (r.coverage_neg >= need && r.coverage_pos >= need) ? 1 : 0;
        cov.push_back(static_cast<double>(std::min(r.coverage_neg, r.coverage_pos)));
    }
    const double frac = qualifying.empty() ? 0.0 : static_cast<double>(good) / static_cast<double>(qualifying.size());
    ctx.result("excursions_total", total);
    ctx.result("excursions_qualifying", qualifying.size());
    ctx.result("cells_required", need);
    ctx.result("fraction_covering", frac);
    if (!cov.empty()) ctx.result("median_min_branch_coverage", stats::median(cov));

    // Coverage against the shorter branch span, to separate the threshold from
    // the mixing mechanism.
    const std::vector<double> edges{20.0, 40.0, 80.0, std::numeric_limits<double>::infinity()};
    json buckets = json::array();
    for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
        std::size_t in = 0, ok = 0;
        for (const auto& r : qualifying) {
            const double span = std::min(r.span_neg, r.span_pos);
            if (span < edges[b] || span >= edges[b + 1]) continue;
            ++in;
            ok += (r.coverage_neg >= need && r.coverage_pos >= need) ? 1 : 0;
        }
        buckets.push_back({{"min_span_from", edges[b]},
                           {"min_span_to", std::isfinite(edges[b + 1]) ? json(edges[b + 1]) : json("inf")},
                           {"excursions", in},
                           {"fraction_covering", in ? static_cast<double>(ok) / static_cast<double>(in) : 0.0}});
    }
    ctx.result("coverage_by_span", buckets);

    // Reference: a plain sphere BM run for exactly min_span from a uniform
    // start, covering >= need cells.
    const auto s_ref = ctx.seed(2);
    const std::size_t n_ref = 2000;
    const auto ref = map_paths(
        n_ref,
        [&](std::size_t i) {
            Stream rng = Stream::for_path(s_ref, i);
            std::vector<bool> seen(cells, false);
            std::size_t count = 0;
            std::vector<double> grid;
            for (double a = 0.0; a <= min_span; a += 1.0) grid.push_back(a);
            sphere::sphere_path(std::nullopt, grid, opts.sphere, rng, [&](double, const sphere::SpherePoint& pt) {
                const auto c = sphere::cell_index(pt, cells);
                if (!seen[c]) {
                    seen[c] = true;
                    ++count;
                }
            });
            return count >= need ? 1.0 : 0.0;
        },
        ctx.exec);
    ctx.result("reference_sphere_bm_covering_fraction_at_min_span", estimate(stats::estimate_mean_ci(ref, s_ref)));
    if (qualifying.size() < 100) ctx.warn("fewer than 100 qualifying excursions");
    ctx.at_least("fraction of qualifying excursions with >= 90% coverage on both branches", frac, 0.95, true);
    ctx.artifact({"excursion_inventory", io::excursion_inventory(qualifying, cells)});
}

// 10 -----------------------------------------------------------------------

void run_tv_divergence(Context& ctx) {
    const ModelParams p(ctx.cfg.gamma);
    fukushima::VariationConfig vc;
    vc.dt = ctx.cfg.dt;
    vc.n_paths = ctx.cfg.n_paths;
    vc.seed = ctx.seed(1);
    const std::vector<std::size_t> grid{2, 4, 8, 16, 32, 64};
    const double T = ctx.cfg.t_max;
    const auto rep = fukushima::total_variation_report(p, T, grid, vc, ctx.exec);
    ctx.result("variation_report", io::to_json(rep));
    ctx.less("relative error of fitted slope vs 2 gamma T", std::abs(rep.fitted_slope - rep.target_slope) / rep.target_slope,
             0.10, true);
    for (std::size_t i = 0; i < grid.size(); ++i)
        ctx.supplementary(Context::make("E[TV] vs exact stationary value, n=" + std::to_string(grid[i]),
                                        rep.tv_estimates[i].mean, rep.expected[i], 3.0 * rep.tv_estimates[i].stderr(),
                                        "abs_le"));
    ctx.supplementary(Context::make("fitted slope vs exact slope on the same grid", rep.fitted_slope,
                                    rep.expected_slope, 3.0 * rep.slope_stderr, "abs_le"));
    ctx.artifact({"variation_report", io::to_json(rep)});
}

// 11 -----------------------------------------------------------------------

void run_approx_converge(Context& ctx) {
    const ModelParams p(ctx.cfg.gamma);
    const std::size_t n = ctx.cfg.n_paths;
    const double t = ctx.cfg.t_max;
    const Vec3 x0{1.0, 0.0, 0.0};
    radial::SimConfig xc;
    xc.dt = 1e-4;
    xc.t_max = t;
    excursion::AssembleOptions opts;
    opts.stride = xc.steps();
    const auto s_x = ctx.seed(1);
    const auto x_radii = map_paths(
        n,
        [&](std::size_t i) {
            Stream rng = Stream::for_path(s_x, i);
            return excursion::assemble_x(p, x0, xc, rng, opts).points.back().norm();
        },
        ctx.exec);
    ctx.result("x_dt", xc.dt);

    json ks_x = json::object();
    json ks_oracle = json::object();
    double ks_first = 0.0, ks_last = 0.0;
    const std::vector<std::size_t> levels{2, 8, 64};
    for (std::size_t level : levels) {
        const approx::TruncParams tp(p, level);
        const auto s_n = ctx.seed(100 + level);
        const auto xn_radii = map_paths(
            n,
            [&](std::size_t i) {
                Stream rng = Stream::for_path(s_n, i);
                return approx::simulate_xn(tp, x0, t, ctx.cfg.dt, rng).end.norm();
            },
            ctx.exec);
        const double d = approx::compare_radial_law(x_radii, xn_radii);
        ks_x[std::to_string(level)] = d;
        if (level == levels.front()) ks_first = d;
        if (level == levels.back()) ks_last = d;

        const auto s_st = ctx.seed(200 + level);
        const auto st_radii = map_paths(
            n,
            [&](std::size_t i) {
                Stream rng = Stream::for_path(s_st, i);
                Stream start = rng.child(0);
                Stream run = rng.child(1);
                const Vec3 y0 = approx::xn_stationary_sample(tp, start);
                return approx::simulate_xn(tp, y0, t, ctx.cfg.dt, run).end.norm();
            },
            ctx.exec);
        const double ko = stats::ks_statistic(st_radii, [&](double r) { return approx::xn_radial_cdf(tp, r); });
        ks_oracle[std::to_string(level)] = ko;
        ctx.less("KS(stationary |X^n|, (psi^n)^2 r^2 oracle), n=" + std::to_string(level), ko, 0.03, true);
    }
    ctx.result("ks_vs_x", ks_x);
    ctx.result("ks_vs_oracle", ks_oracle);
    ctx.less("KS(|X^64_t|, |X_t|)", ks_last, 0.05, true);
    ctx.supplementary(Context::make("KS at n=2 exceeds KS at n=64", ks_first, ks_last, 0.0, "gt"));

    radial::SimConfig pc;
    pc.dt = ctx.cfg.dt;
    pc.t_max = t;
    Stream rng = Stream::for_path(ctx.seed(300), 0);
    ctx.artifact({"xn_path_n64", approx::sample_xn_path(approx::TruncParams(p, 64), x0, pc, rng)});
}

// 12 -----------------------------------------------------------------------

void run_integrability(Context& ctx) {
    const std::map<int, bool> expected{{2, true}, {3, true}, {4, false}, {5, false}};
    json res = json::object();
    for (const auto& [d, want] : expected) {
        const bool got = excursion::lifetime_integrability(d);
        res[std::to_string(d)] = got;
        ctx.equal("lifetime_integrability(" + std::to_string(d) + ")", got, want);
    }
    ctx.result("integrability", res);
}

}  // namespace

Runner find_runner(const std::string& name) {
    static const std::map<std::string, Runner> table{
        {"capacity", run_capacity},
        {"eigen", run_eigen},
        {"radial-absorb", run_radial_absorb},
        {"radial-stationary", run_radial_stationary},
        {"regulator", run_regulator},
        {"sphere-mixing", run_sphere_mixing},
        {"x0-drift", run_x0_drift},
        {"x0-generator", run_x0_generator},
        {"timechange-blowup", run_timechange_blowup},
        {"x-invariant", run_x_invariant},
        {"x-regular-origin", run_x_regular_origin},
        {"excursion-coverage", run_excursion_coverage},
        {"tv-divergence", run_tv_divergence},
        {"approx-converge", run_approx_converge},
        {"integrability", run_integrability},
    };
    const auto it = table.find(name);
    return it == table.end() ? nullptr : it->second;
}

}  // namespace sdlab::harness::detail
