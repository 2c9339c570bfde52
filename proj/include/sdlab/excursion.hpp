#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sdlab/radial.hpp"
#include "sdlab/skewprod.hpp"
#include "sdlab/sphere.hpp"

namespace sdlab::excursion {

using model::ModelParams;

/// One excursion of the reflected radial path away from 0. Grid indices
/// `start` and `end` are the sub-floor points flanking it; `rho` holds the
/// radial values on [start, end] inclusive.
struct ExcursionRecord {
    std::size_t path_id = 0;
    std::size_t start = 0;
    std::size_t end = 0;
    double dt = 0.0;
    double zeta = 0.0;
    std::vector<double> rho;
    /// False for a trailing excursion cut off by the end of the path.
    bool complete = true;

    // Filled by attach_angular.
    bool has_angular = false;
    double U = 0.0;
    /// Local index (into rho) of the anchor U * zeta.
    std::size_t anchor = 0;
    /// Signed intrinsic time relative to the anchor, one entry per rho value.
    std::vector<double> A_rel;
    /// Angular values at the local indices `angular_index`, on the A_rel grid.
    sphere::SpherePath angular;
    std::vector<std::size_t> angular_index;
    double span_neg = 0.0;
    double span_pos = 0.0;
    /// Distinct cells visited by all internal sphere substeps on each branch
    /// (0 unless coverage tracking was requested).
    std::size_t coverage_neg = 0;
    std::size_t coverage_pos = 0;

    std::size_t size() const { return rho.size(); }
};

/// Zero detection default: half a grid standard deviation.
double default_floor(double dt);

/// Maximal runs strictly above `floor` flanked by sub-floor points. With
/// `include_partial` a trailing run that never returns is also reported
/// (complete = false, end = last index).
/// Throws DomainError for paths shorter than 3 points or floor < 0.1 sqrt(dt).
std::vector<ExcursionRecord> extract_excursions(const radial::RadialPath& path, double floor, std::size_t path_id = 0,
                                                bool include_partial = false);

struct AngularOptions {
    double cap = skewprod::default_cap;
    sphere::SpherePathOptions sphere;
    bool track_coverage = false;
    std::size_t n_cells = 48;
};

/// Draws U, builds A_rel with the time-change cap and attaches a two-sided
/// stationary sphere BM: uniform anchor at relative time 0, then independent
/// forward sphere BMs along the positive and the (reversed) negative branch.
/// Sphere BM is reversible with respect to the uniform law, so the reversed
/// negative branch is again a stationary BM path.
///
/// `keep` lists local indices that need an angular value (sorted); empty means
/// all. The anchor is always included. An incomplete record is anchored at its
/// last point and only has a negative branch.
void attach_angular(ExcursionRecord& exc, Stream& rng, const AngularOptions& opts = {},
                    std::span<const std::size_t> keep = {});

struct AssembleOptions {
    /// Zero floor; <= 0 selects default_floor(dt).
    double floor = 0.0;
    /// Output every `stride`-th grid point (angular parts are only simulated
    /// there). The output dt is cfg.dt * stride.
    std::size_t stride = 1;
    AngularOptions angular;
};

/// Full recurrent process on [0, t_max]. For x0 != 0 the initial segment is
/// X^0 started at x0 up to its lifetime; afterwards the reflected radial path
/// runs from 0 and each excursion receives an independent angular part.
/// Sub-floor radial values after the first hit of 0 are emitted as the origin.
skewprod::PathR3 assemble_x(const ModelParams& p, const Vec3& x0, const radial::SimConfig& cfg, Stream& rng,
                            const AssembleOptions& opts = {});

/// Same construction as assemble_x, also returning the radial path the output
/// was built from (full grid).
struct AssembledX {
    skewprod::PathR3 path;
    radial::RadialPath radial;
    /// First grid index of the reflected part (= steps + 1 if never absorbed).
    std::size_t reflected_from = 0;
};
AssembledX assemble_x_with_radial(const ModelParams& p, const Vec3& x0, const radial::SimConfig& cfg, Stream& rng,
                                  const AssembleOptions& opts = {});

/// Whether the excursion-lifetime tail t^{-d/2} is integrable against
/// min(t, 1) at t -> 0, i.e. d < 4. Throws DomainError for d < 2.
bool lifetime_integrability(int d);

}  // namespace sdlab::excursion
