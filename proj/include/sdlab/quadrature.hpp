#pragma once

#include <functional>

namespace sdlab::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;
};

/// Adaptive Gauss-Kronrod (15-point) integration of `f` on the finite [a, b].
/// Throws ConvergenceError when the error estimate exceeds `abs_tol`.
Result integrate(const std::function<double(double)>& f, double a, double b, double abs_tol = 1e-10);

}  // namespace sdlab::quad
