#include "sdlab/model.hpp"

#include <cmath>
#include <numbers>

#include "sdlab/error.hpp"
#include "sdlab/quadrature.hpp"

namespace sdlab::model {

namespace {

double checked_norm(const Vec3& x, const char* who) {
    const double r = x.norm();
    if (!(r > 0.0)) throw SingularPointError(std::string(who) + ": |x| = 0 is the singular point");
    return r;
}

}  // namespace

ModelParams::ModelParams(double gamma) : gamma_(gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("ModelParams: gamma must be positive and finite");
    // gamma - sqrt(gamma^2 + 2) without the cancellation.
    c_ = -2.0 / (gamma + std::sqrt(gamma * gamma + 2.0));
    psi_norm_ = std::sqrt(gamma / (2.0 * std::numbers::pi));
}

double psi_radial(const ModelParams& p, double r) {
    if (!(r > 0.0)) throw SingularPointError("psi_radial: r = 0 is the singular point");
    return p.psi_norm() * std::exp(-p.gamma() * r) / r;
}

double drift_radial(const ModelParams& p, double r) {
    if (!(r > 0.0)) throw SingularPointError("drift_radial: r = 0 is the singular point");
    return -(1.0 / r + p.gamma());
}

double psi_eval(const ModelParams& p, const Vec3& x) { return psi_radial(p, checked_norm(x, "psi_eval")); }

Vec3 drift_eval(const ModelParams& p, const Vec3& x) {
    const double r = checked_norm(x, "drift_eval");
    return x * (-(1.0 / (r * r) + p.gamma() / r));
}

Vec3 drift_generator(const ModelParams& p, const Vec3& x) {
    // b = phi(r) x/r with phi = -(gamma + 1/r); for such fields
    // A b = [(phi'' + 2 phi'/r - 2 phi/r^2)/2 + phi phi'] x/r.
    const double r = checked_norm(x, "drift_generator");
    const double phi = -(p.gamma() + 1.0 / r);
    const double d1 = 1.0 / (r * r);
    const double d2 = -2.0 / (r * r * r);
    const double radial = 0.5 * (d2 + 2.0 * d1 / r - 2.0 * phi / (r * r)) + phi * d1;
    return x * (radial / r);
}

double m_radial_density(const ModelParams& p, double r) {
    if (r < 0.0) return 0.0;
    return 2.0 * p.gamma() * std::exp(-2.0 * p.gamma() * r);
}

double m_radial_cdf(const ModelParams& p, double r) {
    if (r <= 0.0) return 0.0;
    return -std::expm1(-2.0 * p.gamma() * r);
}

double equilibrium_potential(const ModelParams& p, double eps, double r) {
    if (!(eps > 0.0)) throw DomainError("equilibrium_potential: eps must be positive");
    if (r <= eps) return 1.0;
    return std::exp(p.c() * (r - eps));
}

double equilibrium_potential_derivative(const ModelParams& p, double eps, double r) {
    if (!(eps > 0.0)) throw DomainError("equilibrium_potential_derivative: eps must be positive");
    if (r <= eps) return 0.0;
    return p.c() * std::exp(p.c() * (r - eps));
}

double energy_e1(const ModelParams& p, double eps, EnergyMode mode, double abs_tol) {
    if (!(eps > 0.0)) throw DomainError("energy_e1: eps must be positive");
    const double g = p.gamma();
    const double c = p.c();
    if (mode == EnergyMode::closed_form) return 1.0 + (c + g * c * c) / (g - c) * std::exp(-2.0 * g * eps);

    // Radial reduction: int h(|x|) psi^2 dx = int_0^inf h(r) 2 gamma e^{-2 gamma r} dr.
    const double r_max = eps + 40.0 / g;
    auto weight = [&](double r) { return m_radial_density(p, r); };
    auto outer = [&](double r) {
        const double f = equilibrium_potential(p, eps, r);
        const double df = equilibrium_potential_derivative(p, eps, r);
        return (f * f + df * df) * weight(r);
    };
    const auto inner = quad::integrate(weight, 0.0, eps, abs_tol / 2.0);
    const auto out = quad::integrate(outer, eps, r_max, abs_tol / 2.0);
    // f <= 1 and |f'| <= |c| beyond r_max.
    const double tail_bound = (1.0 + c * c) * std::exp(-2.0 * g * r_max);
    const double error = inner.error + out.error + tail_bound;
    if (error > abs_tol) throw ConvergenceError("energy_e1: quadrature tolerance not met", error);
    return inner.value + out.value;
}

double capacity_origin(const ModelParams& p) {
    const double g = p.gamma();
    const double c = p.c();
    return (g + g * c * c) / (g - c);
}

double eigen_residual(const ModelParams& p, double r, double h) {
    if (!(h > 0.0) || !(r > 2.0 * h)) throw DomainError("eigen_residual: need r > 2h > 0 (step too large relative to r)");
    // (1/r^2)(r^2 psi')' == (1/r)(r psi)''; r psi is a pure exponential, which
    // keeps the truncation error O(h^2 gamma^4 psi) uniformly in r.
    auto u = [&](double s) { return s * psi_radial(p, s); };
    const double second = (u(r + h) - 2.0 * u(r) + u(r - h)) / (h * h);
    const double half_laplacian = 0.5 * second / r;
    return half_laplacian - 0.5 * p.gamma() * p.gamma() * psi_radial(p, r);
}

}  // namespace sdlab::model
