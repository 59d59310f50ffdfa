#pragma once

#include <functional>
#include <utility>

#include "phase_engine/common.hpp"

namespace phase_engine {

// n-point Gauss-Legendre rule mapped to [a, b]. Nodes ascending, strictly
// inside the open interval.
std::pair<VectorXd, VectorXd> gauss_legendre(int n, double a, double b);

// Adaptive Gauss-Kronrod 7/15 bisection. Throws std::runtime_error when the
// error estimate cannot be brought under max(abs_tol, rel_tol * |I|).
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-12, double abs_tol = 1e-14);

}  // namespace phase_engine
