#include "dacx/ode.hpp"

#include <algorithm>
#include <cmath>

#include "dacx/errors.hpp"

namespace dacx {

namespace {

// Dormand-Prince 5(4) tableau.
const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
const double a21 = 1.0 / 5;
const double a31 = 3.0 / 40, a32 = 9.0 / 40;
const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
             a54 = -212.0 / 729;
const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
             a65 = -5103.0 / 18656;
const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
             b6 = 11.0 / 84;
const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
             e6 = 22.0 / 525, e7 = -1.0 / 40;

struct StepResult {
    double y_new;
    double err;
    double k7; // FSAL derivative at the new point
};

StepResult dopri_step(const std::function<double(double, double)> &f, double x, double y,
                      double h, double k1) {
    double k2 = f(x + c2 * h, y + h * a21 * k1);
    double k3 = f(x + c3 * h, y + h * (a31 * k1 + a32 * k2));
    double k4 = f(x + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    double k5 = f(x + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    double k6 = f(x + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    double ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    double k7 = f(x + h, ynew);
    double err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    return {ynew, std::abs(err), k7};
}

// One implicit trapezoid step solved by Newton with a numeric Jacobian.
double trapezoid_step(const std::function<double(double, double)> &f, double x, double y,
                      double h) {
    double fx = f(x, y);
    double z = y + h * fx; // explicit Euler predictor
    for (int it = 0; it < 50; ++it) {
        double g = z - y - 0.5 * h * (fx + f(x + h, z));
        double dz = std::max(1e-8, 1e-8 * std::abs(z));
        double dg = (f(x + h, z + dz) - f(x + h, z - dz)) / (2 * dz);
        double jac = 1.0 - 0.5 * h * dg;
        double step = g / (jac != 0 ? jac : 1.0);
        z -= step;
        if (std::abs(step) <= 1e-14 * (1.0 + std::abs(z)))
            return z;
    }
    throw numeric_error("implicit trapezoid step did not converge");
}

} // namespace

double integrate_ode(const std::function<double(double, double)> &f, double x0, double y0,
                     double x1, const OdeOptions &opts,
                     const std::function<bool(double, double)> &watch) {
    if (x0 == x1)
        return y0;
    double dir = x1 > x0 ? 1.0 : -1.0;
    double x = x0, y = y0;
    double h = dir * std::min(std::abs(opts.h_init), std::abs(x1 - x0));
    double k1 = f(x, y);
    int rejects_in_row = 0;
    for (long step = 0; step < opts.max_steps; ++step) {
        if (dir * (x - x1) >= 0)
            return y;
        if (dir * (x + h - x1) > 0)
            h = x1 - x;
        StepResult r = dopri_step(f, x, y, h, k1);
        double sc = opts.abs_tol + opts.rel_tol * std::max(std::abs(y), std::abs(r.y_new));
        double ratio = r.err / sc;
        if (std::isnan(r.y_new) || std::isinf(r.y_new))
            ratio = HUGE_VAL;
        if (ratio <= 1.0) {
            x += h;
            y = r.y_new;
            k1 = r.k7;
            rejects_in_row = 0;
            if (watch && watch(x, y))
                return y;
            double grow = ratio > 0 ? 0.9 * std::pow(ratio, -0.2) : 5.0;
            h *= std::clamp(grow, 0.2, 5.0);
        } else {
            ++rejects_in_row;
            if (std::abs(h) < opts.h_min * 100 || rejects_in_row > 30) {
                // stiffness fallback: a stretch of implicit trapezoid steps
                double ht = dir * std::max(std::abs(h) * 50, opts.h_min * 1000);
                for (int i = 0; i < 200 && dir * (x - x1) < 0; ++i) {
                    if (dir * (x + ht - x1) > 0)
                        ht = x1 - x;
                    y = trapezoid_step(f, x, y, ht);
                    x += ht;
                    if (watch && watch(x, y))
                        return y;
                }
                k1 = f(x, y);
                h = dir * std::max(std::abs(ht), std::abs(opts.h_init));
                rejects_in_row = 0;
                continue;
            }
            h *= std::clamp(0.9 * std::pow(ratio, -0.2), 0.1, 0.5);
        }
        if (std::abs(h) < opts.h_min)
            throw numeric_error("ode step size underflow");
    }
    throw numeric_error("ode integration exceeded the step budget");
}

} // namespace dacx
