#pragma once

#include "sdlab/vec3.hpp"

namespace sdlab::model {

/// The drift/eigenvalue parameter gamma > 0 and the cached characteristic
/// root c = gamma - sqrt(gamma^2 + 2) of f'' - 2 gamma f' - 2 f = 0.
class ModelParams {
public:
    explicit ModelParams(double gamma);

    double gamma() const noexcept { return gamma_; }
    double c() const noexcept { return c_; }
    /// sqrt(gamma / (2 pi)), the normalization of psi.
    double psi_norm() const noexcept { return psi_norm_; }

private:
    double gamma_;
    double c_;
    double psi_norm_;
};

// Radial forms (argument r = |x|).

double psi_radial(const ModelParams& p, double r);
/// Radial component of grad log psi: -(1/r + gamma).
double drift_radial(const ModelParams& p, double r);

/// psi(x) = sqrt(gamma/2pi) exp(-gamma|x|)/|x|. Throws SingularPointError at 0.
double psi_eval(const ModelParams& p, const Vec3& x);

/// grad log psi(x) = -x (|x|^-2 + gamma |x|^-1). Throws SingularPointError at 0.
Vec3 drift_eval(const ModelParams& p, const Vec3& x);

/// Generator applied to the drift field, A b = (1/2) Lap b + (b . grad) b, in
/// closed form. Used as the second-order term of small-time drift estimates.
Vec3 drift_generator(const ModelParams& p, const Vec3& x);

/// Density of |X| under m = psi^2 dx: 2 gamma exp(-2 gamma r).
double m_radial_density(const ModelParams& p, double r);
double m_radial_cdf(const ModelParams& p, double r);

/// 1 on [0, eps], exp(c (r - eps)) beyond. Throws DomainError if eps <= 0.
double equilibrium_potential(const ModelParams& p, double eps, double r);
double equilibrium_potential_derivative(const ModelParams& p, double eps, double r);

enum class EnergyMode { closed_form, quadrature };

/// E_1(f_eps, f_eps) of the equilibrium potential of the ball B_eps.
/// Closed form: 1 + (c + gamma c^2)/(gamma - c) e^{-2 gamma eps}. Quadrature
/// mode integrates int f^2 psi^2 dx + int |grad f|^2 psi^2 dx radially, the
/// sum the closed form evaluates (see "Energy convention" in the README).
double energy_e1(const ModelParams& p, double eps, EnergyMode mode, double abs_tol = 1e-10);

/// Cap({0}) = (gamma + gamma c^2) / (gamma - c).
double capacity_origin(const ModelParams& p);

/// Central-difference estimate of (1/2 Lap psi - gamma^2/2 psi)(r), using the
/// radial Laplacian written as (1/r)(r psi)''. Requires r > 2h > 0.
double eigen_residual(const ModelParams& p, double r, double h);

}  // namespace sdlab::model
