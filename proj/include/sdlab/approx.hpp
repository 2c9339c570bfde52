#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "sdlab/ensemble.hpp"
#include "sdlab/model.hpp"
#include "sdlab/radial.hpp"
#include "sdlab/skewprod.hpp"
#include "sdlab/vec3.hpp"

namespace sdlab::approx {

using model::ModelParams;

/// psi^n: equal to psi outside the ball of radius 1/n, constant (the boundary
/// value) inside.
class TruncParams {
public:
    /// Throws DomainError for n < 1.
    TruncParams(ModelParams base, std::size_t n);

    const ModelParams& base() const noexcept { return base_; }
    std::size_t n() const noexcept { return n_; }
    double cutoff() const noexcept { return cutoff_; }
    double plateau() const noexcept { return plateau_; }

private:
    ModelParams base_;
    std::size_t n_;
    double cutoff_;
    double plateau_;
};

double psi_n_eval(const TruncParams& tp, const Vec3& x);

/// grad log psi^n: the model drift outside the cutoff ball, 0 inside.
Vec3 drift_n(const TruncParams& tp, const Vec3& x);

/// Stationary law of |X^n|: density proportional to psi^n(r)^2 4 pi r^2.
double xn_radial_density(const TruncParams& tp, double r);
double xn_radial_cdf(const TruncParams& tp, double r);
/// Normalizing constant of psi^n(x)^2 dx (the untruncated measure has mass 1).
double xn_mass(const TruncParams& tp);

/// Exact draw from the stationary law of X^n (radius by mixture inversion,
/// uniform direction).
Vec3 xn_stationary_sample(const TruncParams& tp, Stream& rng);

struct XnOptions {
    /// Each Euler substep is at most kappa * max(|x|, 1/n)^2 (and the output dt).
    double kappa = 0.0025;
};

struct XnEnd {
    Vec3 end;
    /// int_0^T |drift_n(X_s)| ds, left-point rule on the substep grid.
    double variation = 0.0;
    std::size_t substeps = 0;
};

/// Euler-Maruyama for dX = dB + drift_n(X) dt on [0, t_max] with adaptive
/// substeps; returns the endpoint and the accumulated drift-norm integral.
XnEnd simulate_xn(const TruncParams& tp, const Vec3& x0, double t_max, double dt, Stream& rng,
                  const XnOptions& opts = {});

/// Same scheme recorded on the uniform grid of `cfg`.
skewprod::PathR3 sample_xn_path(const TruncParams& tp, const Vec3& x0, const radial::SimConfig& cfg, Stream& rng,
                                const XnOptions& opts = {});

/// Two-sample KS distance between |X_t| and |X^n_t| samples. Throws
/// SampleSizeError unless both have the same size >= 1000.
double compare_radial_law(std::span<const double> x_radii, std::span<const double> xn_radii);

}  // namespace sdlab::approx
