#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "sdlab/ensemble.hpp"
#include "sdlab/error.hpp"
#include "sdlab/excursion.hpp"
#include "sdlab/stats.hpp"

using namespace sdlab;
using namespace sdlab::excursion;
using model::ModelParams;

namespace {

radial::RadialPath reflected(double dt, double t_max, std::uint64_t key) {
    Stream rng(key);
    return radial::sample_reflected_path(ModelParams(1.0), 0.0, radial::SimConfig{dt, t_max, 1, 0, true}, rng);
}

}  // namespace

TEST_SUITE("excursion") {

TEST_CASE("extraction on a hand-made path") {
    radial::RadialPath path;
    path.dt = 0.01;
    path.values = {0.0, 0.5, 0.7, 0.0, 0.0, 0.3, 0.0, 0.4, 0.6};
    auto ex = extract_excursions(path, 0.05);
    REQUIRE(ex.size() == 2);
    CHECK(ex[0].start == 0);
    CHECK(ex[0].end == 3);
    CHECK(ex[0].zeta == doctest::Approx(0.03));
    CHECK(ex[0].rho.size() == 4);
    CHECK(ex[1].start == 4);
    CHECK(ex[1].end == 6);
    auto with_tail = extract_excursions(path, 0.05, 0, true);
    REQUIRE(with_tail.size() == 3);
    CHECK_FALSE(with_tail.back().complete);
    CHECK(with_tail.back().end == 8);
    CHECK(extract_excursions(path, 1.0).empty());
    CHECK_THROWS_AS(extract_excursions(path, 0.001), DomainError);
}

TEST_CASE("long run: lifetimes accumulate near zero") {
    const auto path = reflected(1e-3, 200.0, 101);
    const auto ex = extract_excursions(path, default_floor(path.dt));
    std::vector<double> zeta;
    for (const auto& e : ex) zeta.push_back(e.zeta);
    CHECK(std::count_if(zeta.begin(), zeta.end(), [](double z) { return z > 1.0; }) > 0);
    const double mean = stats::estimate_mean_ci(zeta).mean;
    CHECK(stats::median(zeta) < 0.2 * mean);
}

TEST_CASE("occupation identity") {
    const ModelParams p(1.0);
    std::vector<double> occupied;
    for (std::uint64_t k = 0; k < 10; ++k) {
        const auto path = reflected(1e-4, 20.0, 200 + k);
        for (const auto& e : extract_excursions(path, default_floor(path.dt)))
            for (std::size_t i = 1; i + 1 < e.rho.size(); ++i) occupied.push_back(e.rho[i]);
    }
    CHECK(stats::ks_statistic(occupied, [&](double r) { return model::m_radial_cdf(p, r); }) < 0.03);
}

TEST_CASE("angular part is anchored at U zeta") {
    const auto path = reflected(1e-3, 20.0, 103);
    auto ex = extract_excursions(path, default_floor(path.dt));
    REQUIRE(!ex.empty());
    std::size_t checked = 0;
    for (std::size_t i = 0; i < ex.size() && checked < 50; ++i) {
        if (ex[i].size() < 5) continue;
        Stream rng = Stream::for_path(7, i);
        attach_angular(ex[i], rng);
        const auto& e = ex[i];
        REQUIRE(e.has_angular);
        CHECK(e.U > 0.0);
        CHECK(e.U < 1.0);
        CHECK(e.anchor >= 1);
        CHECK(e.anchor + 1 < e.size());
        CHECK(e.A_rel[e.anchor] == 0.0);
        for (std::size_t k = 1; k < e.A_rel.size(); ++k) CHECK(e.A_rel[k] >= e.A_rel[k - 1]);
        const auto pos = std::find(e.angular_index.begin(), e.angular_index.end(), e.anchor);
        REQUIRE(pos != e.angular_index.end());
        CHECK(e.angular.times[static_cast<std::size_t>(pos - e.angular_index.begin())] == 0.0);
        CHECK(e.span_pos == doctest::Approx(e.A_rel.back()));
        CHECK(e.span_neg == doctest::Approx(-e.A_rel.front()));
        ++checked;
    }
    CHECK(checked > 10);
}

TEST_CASE("resampling U leaves the endpoint histogram unchanged") {
    std::vector<std::uint64_t> ha(12, 0), hb(12, 0);
    for (std::uint64_t k = 0; k < 20; ++k) {
        const auto path = reflected(1e-3, 100.0, 300 + k);
        auto ex = extract_excursions(path, default_floor(path.dt));
        for (std::size_t i = 0; i < ex.size(); ++i) {
            auto a = ex[i], b = ex[i];
            Stream ra = Stream::for_path(k, i).child(0), rb = Stream::for_path(k, i).child(1);
            attach_angular(a, ra);
            attach_angular(b, rb);
            ++ha[sphere::cell_index(a.angular.points.back(), 12)];
            ++hb[sphere::cell_index(b.angular.points.back(), 12)];
        }
    }
    CHECK(stats::chi_square_homogeneity(ha, hb).p_value > 0.01);
}

TEST_CASE("assembled X matches its radial path") {
    const ModelParams p(1.0);
    const radial::SimConfig cfg{1e-3, 5.0, 1, 0, true};
    for (const Vec3 x0 : {Vec3{}, Vec3{0.5, 0.5, 0}}) {
        Stream rng(107);
        const auto ax = assemble_x_with_radial(p, x0, cfg, rng);
        REQUIRE(ax.path.size() == ax.radial.size());
        const double floor = default_floor(cfg.dt);
        std::size_t zeros = 0;
        for (std::size_t k = 0; k < ax.path.size(); ++k) {
            const double r = ax.radial.values[k];
            const double n = ax.path.points[k].norm();
            if (k >= ax.reflected_from && r < floor) {
                CHECK(n == 0.0);
                ++zeros;
            } else {
                CHECK(n == doctest::Approx(r).epsilon(1e-15));
            }
        }
        CHECK(zeros == ax.path.zero_hits.size());
        if (x0 == Vec3{}) CHECK(ax.path.points.front() == Vec3{});
        CHECK(ax.path.points.front().norm() == doctest::Approx(x0.norm()));
    }
}

TEST_CASE("stride decimates the same construction") {
    const ModelParams p(1.0);
    const radial::SimConfig cfg{1e-3, 2.0, 1, 0, true};
    AssembleOptions strided;
    strided.stride = 10;
    Stream a(109), b(109);
    const auto full = assemble_x(p, {}, cfg, a);
    const auto thin = assemble_x(p, {}, cfg, b, strided);
    REQUIRE(thin.size() == 201);
    CHECK(thin.dt == doctest::Approx(1e-2));
    for (std::size_t k = 0; k < thin.size(); ++k) CHECK(thin.points[k].norm() == doctest::Approx(full.points[10 * k].norm()).epsilon(1e-15));
}

TEST_CASE("long-run law of |X|") {
    const ModelParams p(1.0);
    const radial::SimConfig cfg{1e-3, 10.0, 1, 0, true};
    AssembleOptions opts;
    opts.stride = cfg.steps();
    auto ends = map_paths(3000, [&](std::size_t i) {
        Stream rng = Stream::for_path(113, i);
        return assemble_x(p, {}, cfg, rng, opts).points.back().norm();
    });
    CHECK(stats::ks_statistic(ends, [&](double r) { return model::m_radial_cdf(p, r); }) < 0.035);
}

TEST_CASE("lifetime integrability") {
    CHECK(lifetime_integrability(2));
    CHECK(lifetime_integrability(3));
    CHECK_FALSE(lifetime_integrability(4));
    CHECK_FALSE(lifetime_integrability(5));
    CHECK_THROWS_AS(lifetime_integrability(1), DomainError);
}

}
