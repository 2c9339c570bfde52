#include "sdlab/quadrature.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sdlab/error.hpp"

namespace sdlab::quad {

Result integrate(const std::function<double(double)>& f, double a, double b, double abs_tol) {
    if (!(b >= a)) throw DomainError("quad::integrate: need a <= b");
    if (a == b) return {};
    double error = 0.0;
    double l1 = 0.0;
    // Boost's tolerance is relative; the absolute target is checked on the
    // returned error estimate. A relative target near machine epsilon makes
    // every leaf hit its 2*eps floor and the summed estimate blows up, so stay
    // well above it.
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 15, 1e-12, &error, &l1);
    if (!std::isfinite(value) || error > abs_tol) {
        throw ConvergenceError("quadrature did not converge on [" + std::to_string(a) + ", " + std::to_string(b) + "]",
                               error);
    }
    return {value, error};
}

}  // namespace sdlab::quad
