#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sdlab/rng.hpp"
#include "sdlab/vec3.hpp"

namespace sdlab::sphere {

/// A point of S^2. Construction normalizes; the stored vector has unit norm
/// to within a few ulp.
class SpherePoint {
public:
    SpherePoint() = default;
    /// Throws DomainError for the zero vector.
    explicit SpherePoint(const Vec3& v);

    const Vec3& unit() const noexcept { return v_; }
    double operator[](std::size_t i) const { return v_[i]; }
    friend bool operator==(const SpherePoint&, const SpherePoint&) = default;

private:
    Vec3 v_{0.0, 0.0, 1.0};
};

/// Trajectory of spherical Brownian motion sampled at intrinsic times `times`.
struct SpherePath {
    std::vector<double> times;
    std::vector<SpherePoint> points;

    std::size_t size() const { return points.size(); }
};

struct SpherePathOptions {
    double max_substep = 0.01;
    /// Grid increments at or above this are replaced by an exact uniform draw.
    double stationarity_threshold = 10.0;
};

/// Receives every internal substep (intrinsic time, point), including the
/// start and any uniform redraws.
using SubstepObserver = std::function<void(double, const SpherePoint&)>;

SpherePoint uniform_point(Stream& rng);

/// Orthonormal basis (e1, e2) of the tangent plane at `n`.
std::pair<Vec3, Vec3> tangent_frame(const Vec3& n);

/// One step of BM with generator (1/2) Lap_{S^2}: Gaussian tangent increment
/// with covariance delta I_2 pushed through the exponential map. delta = 0 is
/// the identity and consumes no randomness.
SpherePoint sphere_step(const SpherePoint& pt, double delta, Stream& rng);

/// Samples BM on S^2 at the nondecreasing intrinsic times `grid` (grid[0] is
/// the start time). Increments above max_substep are subdivided into equal
/// substeps; increments >= stationarity_threshold become uniform draws.
SpherePath sphere_path(std::optional<SpherePoint> start, std::span<const double> grid,
                       const SpherePathOptions& opts, Stream& rng, const SubstepObserver& observer = {});

/// Supported equal-area partitions: 12, 48, 192 cells. See cell_index.
bool supported_cell_count(std::size_t n_cells);

/// Cell of `pt` in the latitude-band partition with B bands of equal height in
/// z (equal area by Archimedes) and S equal longitude sectors:
/// (B, S) = (3, 4), (6, 8), (12, 16) for 12, 48, 192 cells. Each refinement
/// doubles both counts. Index = band * S + sector.
std::size_t cell_index(const SpherePoint& pt, std::size_t n_cells);

std::vector<std::uint64_t> cell_histogram(std::span<const SpherePoint> points, std::size_t n_cells);

}  // namespace sdlab::sphere
