#include "sdlab/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sdlab/error.hpp"

namespace sdlab::sphere {

SpherePoint::SpherePoint(const Vec3& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("SpherePoint: cannot normalize a zero or non-finite vector");
    v_ = v * (1.0 / n);
}

SpherePoint uniform_point(Stream& rng) {
    const double z = 2.0 * rng.uniform() - 1.0;
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return SpherePoint(Vec3{s * std::cos(phi), s * std::sin(phi), z});
}

std::pair<Vec3, Vec3> tangent_frame(const Vec3& n) {
    // Duff et al., "Building an orthonormal basis, revisited".
    const double sign = std::copysign(1.0, n.z);
    const double a = -1.0 / (sign + n.z);
    const double b = n.x * n.y * a;
    return {Vec3{1.0 + sign * n.x * n.x * a, sign * b, -sign * n.x}, Vec3{b, sign + n.y * n.y * a, -n.y}};
}

SpherePoint sphere_step(const SpherePoint& pt, double delta, Stream& rng) {
    if (delta < 0.0) throw DomainError("sphere_step: delta must be >= 0");
    if (delta == 0.0) return pt;
    const double sd = std::sqrt(delta);
    const double g1 = sd * rng.normal();
    const double g2 = sd * rng.normal();
    const auto [e1, e2] = tangent_frame(pt.unit());
    const Vec3 v = e1 * g1 + e2 * g2;
    const double theta = v.norm();
    if (theta == 0.0) return pt;
    return SpherePoint(pt.unit() * std::cos(theta) + v * (std::sin(theta) / theta));
}

SpherePath sphere_path(std::optional<SpherePoint> start, std::span<const double> grid,
                       const SpherePathOptions& opts, Stream& rng, const SubstepObserver& observer) {
    if (!(opts.max_substep > 0.0)) throw DomainError("sphere_path: max_substep must be positive");
    SpherePath path;
    if (grid.empty()) return path;
    path.times.assign(grid.begin(), grid.end());
    path.points.reserve(grid.size());
    SpherePoint pt = start ? *start : uniform_point(rng);
    path.points.push_back(pt);
    if (observer) observer(grid[0], pt);
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double inc = grid[k] - grid[k - 1];
        if (!(inc >= 0.0)) throw DomainError("sphere_path: grid must be nondecreasing");
        if (inc >= opts.stationarity_threshold) {
            pt = uniform_point(rng);
            if (observer) observer(grid[k], pt);
        } else if (inc > 0.0) {
            const auto n_sub = static_cast<std::size_t>(std::ceil(inc / opts.max_substep));
            const double sub = inc / static_cast<double>(n_sub);
            for (std::size_t j = 1; j <= n_sub; ++j) {
                pt = sphere_step(pt, sub, rng);
                if (observer) observer(grid[k - 1] + sub * static_cast<double>(j), pt);
            }
        }
        path.points.push_back(pt);
    }
    return path;
}

namespace {

struct Partition {
    std::size_t bands;
    std::size_t sectors;
};

Partition partition_for(std::size_t n_cells) {
    switch (n_cells) {
        case 12: return {3, 4};
        case 48: return {6, 8};
        case 192: return {12, 16};
        default: throw DomainError("unsupported cell count " + std::to_string(n_cells) + " (use 12, 48 or 192)");
    }
}

}  // namespace

bool supported_cell_count(std::size_t n_cells) { return n_cells == 12 || n_cells == 48 || n_cells == 192; }

std::size_t cell_index(const SpherePoint& pt, std::size_t n_cells) {
    const auto [bands, sectors] = partition_for(n_cells);
    const Vec3& v = pt.unit();
    const double zb = (std::clamp(v.z, -1.0, 1.0) + 1.0) * 0.5 * static_cast<double>(bands);
    const auto band = std::min(static_cast<std::size_t>(zb), bands - 1);
    const double phi = std::atan2(v.y, v.x) + std::numbers::pi;
    const double sb = phi / (2.0 * std::numbers::pi) * static_cast<double>(sectors);
    const auto sector = std::min(static_cast<std::size_t>(sb), sectors - 1);
    return band * sectors + sector;
}

std::vector<std::uint64_t> cell_histogram(std::span<const SpherePoint> points, std::size_t n_cells) {
    std::vector<std::uint64_t> counts(n_cells, 0);
    partition_for(n_cells);
    for (const auto& p : points) ++counts[cell_index(p, n_cells)];
    return counts;
}

}  // namespace sdlab::sphere
