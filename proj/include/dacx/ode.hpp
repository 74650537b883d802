#pragma once

#include <functional>

namespace dacx {

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double h_init = 1e-4;
    double h_min = 1e-14;
    long max_steps = 4000000;
};

// Integrates the scalar ODE y' = f(x, y) from (x0, y0) to x1 (either
// direction). Adaptive Dormand-Prince 5(4); when step control collapses the
// step, falls back to a stretch of fixed implicit-trapezoid steps until the
// scheme recovers. `watch`, when set, is called after every accepted step and
// stops the integration early by returning true. The fallback stretch is
// A-stable but runs without local error control.
double integrate_ode(const std::function<double(double, double)> &f, double x0, double y0,
                     double x1, const OdeOptions &opts = OdeOptions(),
                     const std::function<bool(double, double)> &watch = nullptr);

} // namespace dacx
