#include <doctest.h>

#include <cmath>
#include <vector>

#include "sdlab/ensemble.hpp"
#include "sdlab/error.hpp"
#include "sdlab/radial.hpp"
#include "sdlab/stats.hpp"

using namespace sdlab;
using namespace sdlab::radial;
using model::ModelParams;

TEST_SUITE("radial") {

TEST_CASE("scale and speed") {
    const ModelParams p(1.0);
    auto s0 = scale_and_speed(p, 0.0);
    CHECK(s0.scale == doctest::Approx(0.25));
    CHECK(s0.speed_density == doctest::Approx(2.0));
    auto s1 = scale_and_speed(p, std::log(2.0));
    CHECK(s1.scale == doctest::Approx(1.0));
    CHECK(s1.speed_density == doctest::Approx(0.5));
    for (double x : {0.1, 0.7, 2.5}) {
        const double h = 1e-6;
        const double ds = (scale_and_speed(p, x + h).scale - scale_and_speed(p, x - h).scale) / (2 * h);
        CHECK(ds * scale_and_speed(p, x).speed_density == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("exit probability and absorption time closed forms") {
    const ModelParams p(1.0);
    CHECK(hit_prob_zero_before(p, std::log(2.0) / 2, std::log(2.0)) == doctest::Approx(2.0 / 3.0));
    CHECK(hit_prob_zero_before(p, 1e-9, 1.0) == doctest::Approx(1.0));
    CHECK(hit_prob_zero_before(p, 1.0 - 1e-9, 1.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(hit_prob_zero_before(p, 2.0, 1.0), DomainError);
    CHECK(expected_absorption_time(p, 1.0) == 1.0);
    CHECK(expected_absorption_time(ModelParams(2.0), 1.0) == 0.5);
    CHECK(expected_absorption_time(p, 1e-12) == doctest::Approx(0.0));
    CHECK(bridge_hit_probability(0.1, 0.1, 0.01) == doctest::Approx(std::exp(-2.0)));
}

TEST_CASE("absorbed paths: mean lifetime") {
    const ModelParams p(1.0);
    SimConfig cfg{1e-3, 50.0, 10000, 7, true};
    auto taus = map_paths(cfg.n_paths, [&](std::size_t i) {
        Stream rng = Stream::for_path(cfg.seed, i);
        auto path = sample_absorbed_path(p, 1.0, cfg, rng);
        REQUIRE(path.absorbed);
        CHECK(path.values.back() == 0.0);
        return *path.absorption_time();
    });
    const auto est = stats::estimate_mean_ci(taus);
    CHECK(est.covers(1.0));
}

TEST_CASE("absorbed paths: exit side frequency") {
    const ModelParams p(1.0);
    SimConfig cfg{1e-3, 100.0, 10000, 11, true};
    auto hits = map_paths(cfg.n_paths, [&](std::size_t i) {
        Stream rng = Stream::for_path(cfg.seed, i);
        return sample_exit_side(p, 1.0, 2.0, cfg, rng) == ExitSide::zero ? 1.0 : 0.0;
    });
    CHECK(stats::estimate_mean_ci(hits).covers(hit_prob_zero_before(p, 1.0, 2.0)));
}

TEST_CASE("reflected path: regulator bookkeeping") {
    const ModelParams p(1.0);
    SimConfig cfg{1e-3, 5.0, 1, 3, true};
    Stream rng(42);
    auto path = sample_reflected_path(p, 0.0, cfg, rng);
    REQUIRE(path.regulator);
    const auto& L = *path.regulator;
    CHECK(L.front() == 0.0);
    for (std::size_t k = 1; k < L.size(); ++k) CHECK(L[k] >= L[k - 1]);
    for (double v : path.values) CHECK(v >= 0.0);
    CHECK_FALSE(path.absorbed);

    // The endpoint runner replays the same draws.
    Stream again(42);
    const auto end = run_reflected(p, 0.0, cfg.dt, cfg.steps(), again);
    CHECK(end.value == path.values.back());
    CHECK(end.regulator == L.back());
}

TEST_CASE("reflected path far from the boundary has no regulator") {
    const ModelParams p(1.0);
    SimConfig cfg{1e-3, 0.1, 1, 0, true};
    int active = 0;
    for (std::size_t i = 0; i < 200; ++i) {
        Stream rng = Stream::for_path(5, i);
        if (sample_reflected_path(p, 5.0, cfg, rng).regulator->back() > 0.0) ++active;
    }
    CHECK(active == 0);
}

TEST_CASE("reflected stationarity and regulator balance") {
    const ModelParams p(1.0);
    const double dt = 1e-3;
    const std::size_t steps = 20000;
    auto ends = map_paths(2000, [&](std::size_t i) {
        Stream rng = Stream::for_path(17, i);
        return run_reflected(p, 0.0, dt, steps, rng).value;
    });
    const double d = stats::ks_statistic(ends, [&](double r) { return model::m_radial_cdf(p, r); });
    CHECK(d < 0.04);

    auto rates = map_paths(2000, [&](std::size_t i) {
        Stream rng = Stream::for_path(19, i);
        const double x0 = stationary_sampler(p, rng);
        return run_reflected(p, x0, dt, 5000, rng).regulator / 5.0;
    });
    CHECK(std::abs(stats::estimate_mean_ci(rates).mean - p.gamma()) < 0.05 * p.gamma());
}

TEST_CASE("occupation local time") {
    RadialPath path;
    path.dt = 0.1;
    path.values = {1.0, 2.0, 3.0, 2.0};
    CHECK(occupation_local_time(path, 0.5).value == 0.0);
    path.values = {0.1, 0.2, 0.9, 0.3};
    const auto est = occupation_local_time(path, 0.5);
    CHECK(est.value == doctest::Approx(0.1 * 2 / (2 * 0.5)));
    CHECK(occupation_local_time(path, 0.01).under_resolved);
    CHECK(default_band(1e-4) == doctest::Approx(0.1));
    CHECK_THROWS_AS(occupation_local_time(path, 0.0), DomainError);
}

TEST_CASE("stationary sampler") {
    for (double g : {1.0, 2.0}) {
        const ModelParams p(g);
        Stream rng(99);
        std::vector<double> xs(100000);
        for (auto& x : xs) {
            x = stationary_sampler(p, rng);
            CHECK(x > 0.0);
        }
        CHECK(stats::estimate_mean_ci(xs).covers(1.0 / (2.0 * g)));
    }
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS((SimConfig{0.0, 1.0, 1, 0, true}.validate()), DomainError);
    CHECK_THROWS_AS((SimConfig{2.0, 1.0, 1, 0, true}.validate()), DomainError);
    CHECK_THROWS_AS((SimConfig{1e-3, 1.0, 0, 0, true}.validate()), DomainError);
    CHECK(SimConfig{1e-3, 1.0, 1, 0, true}.steps() == 1000);
    Stream rng(1);
    CHECK_THROWS_AS(sample_absorbed_path(ModelParams(1.0), 0.0, SimConfig{}, rng), DomainError);
    CHECK_THROWS_AS(sample_reflected_path(ModelParams(1.0), -1.0, SimConfig{}, rng), DomainError);
}

}
