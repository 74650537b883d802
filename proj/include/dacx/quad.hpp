#pragma once

#include <functional>

namespace dacx {

// Tolerances and ray-truncation policy for the fast-function evaluators.
struct QuadConfig {
    double abs_tol = 1e-12;
    // Kernel weight exp(-(T^p - X^p)) is dropped once below this relative level.
    double ray_weight_floor = 1e-18;
    int max_depth = 26;
};

// Adaptive 15-point Gauss-Kronrod on [a, b] with absolute tolerance.
// Throws numeric_error if the requested tolerance cannot be met.
double integrate_gk(const std::function<double(double)> &f, double a, double b,
                    double abs_tol, int max_depth = 26);

// Like integrate_gk but never throws; reports the achieved error estimate.
double integrate_gk_estimate(const std::function<double(double)> &f, double a, double b,
                             double abs_tol, double &err_estimate, int max_depth = 26);

} // namespace dacx
