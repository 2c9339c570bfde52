#include <doctest.h>

#include <boost/math/special_functions/expint.hpp>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "sdlab/approx.hpp"
#include "sdlab/ensemble.hpp"
#include "sdlab/error.hpp"
#include "sdlab/fukushima.hpp"
#include "sdlab/stats.hpp"

using namespace sdlab;
using namespace sdlab::fukushima;
using model::ModelParams;

TEST_SUITE("fukushima") {

TEST_CASE("zero-energy integral of constant and reflected paths") {
    const ModelParams p(1.0);
    skewprod::PathR3 path;
    path.dt = 1e-2;
    path.points.assign(101, Vec3{1, 0, 0});
    const auto N = zero_energy_integral(p, path, 1.0);
    REQUIRE(N.size() == 101);
    CHECK(N.back().x == doctest::Approx(-2.0));
    CHECK(N.back().y == 0.0);

    skewprod::PathR3 wiggle, mirror;
    wiggle.dt = mirror.dt = 1e-2;
    for (int k = 0; k <= 100; ++k) {
        const Vec3 v{1.0 + 0.3 * std::sin(k * 0.1), 0.2 * std::cos(k * 0.3), 0.5};
        wiggle.points.push_back(v);
        mirror.points.push_back(-v);
    }
    const auto a = zero_energy_integral(p, wiggle, 1.0), b = zero_energy_integral(p, mirror, 1.0);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == -b[k]);

    path.points[50] = Vec3{};
    CHECK_THROWS_AS(zero_energy_integral(p, path, 1.0), SingularPointError);
}

TEST_CASE("martingale part is centered") {
    const ModelParams p(1.0);
    const double h = 0.01, dt = 1e-4;
    const Vec3 x{1, 0, 0};
    auto resid = map_paths(20000, [&](std::size_t i) {
        Stream rng = Stream::for_path(79, i);
        Stream rr = rng.child(0), sr = rng.child(1);
        const auto r = radial::sample_absorbed_path(p, 1.0, radial::SimConfig{dt, h, 1, 0, true}, rr);
        const auto X = skewprod::assemble_x0(r, skewprod::time_change(r), sphere::SpherePoint(x), {}, sr);
        const auto N = zero_energy_integral(p, X, h);
        return X.points.back() - x - N.back();
    });
    for (std::size_t i = 0; i < 3; ++i) {
        std::vector<double> c(resid.size());
        for (std::size_t k = 0; k < c.size(); ++k) c[k] = resid[k][i];
        CHECK(stats::estimate_mean_ci(c).covers(0.0));
    }
}

TEST_CASE("signed measure density") {
    const ModelParams p(1.0);
    CHECK(signed_measure_density(p, {1, 0, 0}, 0) == doctest::Approx(-0.043078558603697276).epsilon(1e-14));
    CHECK(signed_measure_density(p, {1, 0, 0}, 1) == 0.0);
    const Vec3 x{0.3, -0.5, 0.8};
    for (std::size_t i = 0; i < 3; ++i) CHECK(signed_measure_density(p, x, i) == -signed_measure_density(p, -x, i));
    CHECK_THROWS_AS(signed_measure_density(p, x, 3), DomainError);
}

TEST_CASE("truncated mass") {
    const ModelParams p(1.0);
    const double diff = truncated_mass(p, 1e-3) - truncated_mass(p, 1e-2);
    CHECK(diff == doctest::Approx(2.0 * std::log(10.0)).epsilon(0.02));
    for (double g : {0.5, 1.0, 2.0})
        for (double d : {1e-3, 0.1, 1.0}) {
            const ModelParams q(g);
            const double exact = g * std::exp(-2 * g * d) + 2 * g * boost::math::expint(1, 2 * g * d);
            CHECK(truncated_mass(q, d) == doctest::Approx(exact).epsilon(1e-10));
        }
    double prev = truncated_mass(p, 0.01);
    for (double d = 0.02; d < 20.0; d *= 2) {
        const double v = truncated_mass(p, d);
        CHECK(v < prev);
        prev = v;
    }
    CHECK(truncated_mass(p, 30.0) < 1e-20);
    CHECK_THROWS_AS(truncated_mass(p, 0.0), DomainError);
}

TEST_CASE("total variation report") {
    const ModelParams p(1.0);
    VariationConfig cfg;
    cfg.n_paths = 400;
    cfg.seed = 83;
    const auto rep = total_variation_report(p, 0.5, {1, 4}, cfg);
    REQUIRE(rep.tv_estimates.size() == 2);
    CHECK(std::isfinite(rep.tv_estimates[0].mean));
    CHECK(rep.tv_estimates[0].mean > 0.0);
    CHECK(rep.target_slope == doctest::Approx(1.0));
    for (std::size_t i = 0; i < 2; ++i) CHECK(rep.tv_estimates[i].covers(rep.expected[i]));

    // Stationary additivity: doubling T doubles the expectation.
    const auto rep2 = total_variation_report(p, 1.0, {1, 4}, cfg);
    for (std::size_t i = 0; i < 2; ++i) {
        const double diff = rep2.tv_estimates[i].mean - 2.0 * rep.tv_estimates[i].mean;
        const double se = std::hypot(rep2.tv_estimates[i].stderr(), 2.0 * rep.tv_estimates[i].stderr());
        CHECK(std::abs(diff) < 3.0 * se);
        CHECK(rep2.expected[i] == doctest::Approx(2.0 * rep.expected[i]));
    }
    CHECK_THROWS_AS(total_variation_report(p, 1.0, {4}, cfg), DomainError);
    CHECK_THROWS_AS(total_variation_report(p, 1.0, {4, 2}, cfg), DomainError);
}

}
