#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sdlab/ensemble.hpp"
#include "sdlab/error.hpp"
#include "sdlab/sphere.hpp"
#include "sdlab/stats.hpp"

using namespace sdlab;
using namespace sdlab::sphere;

TEST_SUITE("sphere") {

TEST_CASE("zero step is the identity and draws nothing") {
    const SpherePoint a(Vec3{0.2, -0.4, 0.9});
    Stream used(3), fresh(3);
    CHECK(sphere_step(a, 0.0, used) == a);
    CHECK(used.bits() == fresh.bits());
}

TEST_CASE("steps stay on the sphere") {
    Stream rng(5);
    SpherePoint pt;
    for (int i = 0; i < 10000; ++i) {
        pt = sphere_step(pt, i % 3 == 0 ? 0.5 : 0.01, rng);
        CHECK(std::abs(pt.unit().norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("tangent frame is orthonormal") {
    for (const Vec3 n : {Vec3{0, 0, 1}, Vec3{0, 0, -1}, Vec3{1, 0, 0}, SpherePoint(Vec3{0.3, -0.2, 0.93}).unit()}) {
        auto [e1, e2] = tangent_frame(n);
        CHECK(std::abs(dot(e1, n)) < 1e-14);
        CHECK(std::abs(dot(e2, n)) < 1e-14);
        CHECK(std::abs(dot(e1, e2)) < 1e-14);
        CHECK(e1.norm() == doctest::Approx(1.0));
        CHECK(e2.norm() == doctest::Approx(1.0));
    }
}

TEST_CASE("one-step correlation matches the first eigenvalue") {
    const double delta = 0.01;
    auto c = map_paths(100000, [&](std::size_t i) {
        Stream rng = Stream::for_path(21, i);
        const SpherePoint a = uniform_point(rng);
        return dot(a.unit(), sphere_step(a, delta, rng).unit());
    });
    CHECK(stats::estimate_mean_ci(c).covers(std::exp(-delta)));
}

TEST_CASE("path correlations decay like exp(-t)") {
    const std::vector<double> grid = {0.0, 0.5, 1.0, 2.0};
    auto paths = map_paths(10000, [&](std::size_t i) {
        Stream rng = Stream::for_path(23, i);
        return sphere_path(std::nullopt, grid, {}, rng);
    });
    for (std::size_t k = 1; k < grid.size(); ++k) {
        std::vector<double> c(paths.size());
        for (std::size_t i = 0; i < paths.size(); ++i) c[i] = dot(paths[i].points[0].unit(), paths[i].points[k].unit());
        CHECK(stats::estimate_mean_ci(c).covers(std::exp(-grid[k])));
    }
}

TEST_CASE("long increments give uniform endpoints") {
    const std::vector<double> grid = {0.0, 50.0};
    std::vector<SpherePoint> ends;
    for (std::size_t i = 0; i < 20000; ++i) {
        Stream rng = Stream::for_path(29, i);
        ends.push_back(sphere_path(SpherePoint(Vec3{0, 0, 1}), grid, {}, rng).points.back());
    }
    CHECK(stats::chi_square_uniform(cell_histogram(ends, 48)).p_value > 0.01);
}

TEST_CASE("single-point grid returns the start") {
    const SpherePoint s(Vec3{1, 1, 0});
    Stream rng(1);
    const double g0 = 3.0;
    auto path = sphere_path(s, std::span<const double>(&g0, 1), {}, rng);
    REQUIRE(path.size() == 1);
    CHECK(path.points[0] == s);
    CHECK(path.times[0] == 3.0);
}

TEST_CASE("uniform points and a single step from them stay uniform") {
    Stream rng(31);
    std::vector<SpherePoint> pts(100000), moved(100000);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        pts[i] = uniform_point(rng);
        moved[i] = sphere_step(pts[i], 0.05, rng);
    }
    const auto h = cell_histogram(pts, 48);
    CHECK(std::accumulate(h.begin(), h.end(), std::uint64_t{0}) == pts.size());
    const auto chi = stats::chi_square_uniform(h);
    CHECK(chi.dof == 47);
    CHECK(chi.p_value > 0.005);
    CHECK(chi.p_value < 0.995);
    CHECK(stats::chi_square_uniform(cell_histogram(moved, 48)).p_value > 0.01);
}

TEST_CASE("partition") {
    CHECK(supported_cell_count(12));
    CHECK(supported_cell_count(48));
    CHECK(supported_cell_count(192));
    CHECK_FALSE(supported_cell_count(50));
    std::vector<SpherePoint> same(10, SpherePoint(Vec3{0.1, 0.2, 0.3}));
    const auto h = cell_histogram(same, 12);
    CHECK(std::count_if(h.begin(), h.end(), [](auto c) { return c > 0; }) == 1);
    CHECK_THROWS_AS(cell_index(SpherePoint(), 50), DomainError);
    // North pole lands in the top band, south pole in the bottom one.
    CHECK(cell_index(SpherePoint(Vec3{0, 0, 1}), 48) / 8 == 5);
    CHECK(cell_index(SpherePoint(Vec3{0, 0, -1}), 48) / 8 == 0);
    for (std::size_t n : {12u, 48u, 192u}) {
        Stream rng(37);
        for (int i = 0; i < 1000; ++i) CHECK(cell_index(uniform_point(rng), n) < n);
    }
}

TEST_CASE("invalid input") {
    CHECK_THROWS_AS(SpherePoint(Vec3{0, 0, 0}), DomainError);
    Stream rng(1);
    CHECK_THROWS_AS(sphere_step(SpherePoint(), -1.0, rng), DomainError);
    const std::vector<double> bad = {0.0, 1.0, 0.5};
    CHECK_THROWS_AS(sphere_path(std::nullopt, bad, {}, rng), DomainError);
}

}
