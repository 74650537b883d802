#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dacx/combined.hpp"
#include "dacx/equations.hpp"
#include "dacx/ode.hpp"
#include "dacx/rational.hpp"

namespace dacx {

// ---- linear model (first introductory family) ----

// Combined expansion of the solution of eps y' = p x^{p-1} y + eps g(x)
// bounded on the chosen ray, built by iterated jet peeling and integration by
// parts. Needs g Taylor data to order >= M + p*(N/p + 1).
template <class T>
CombinedSeries<T> dac_linear_model(const std::vector<T> &g_taylor, int p, int ray, int N, int M);

// Initial-layer family eps y' = -2x y + eps g(x), y(0) = c(eps): fast parts
// combine the attracting-kernel integral and the Gaussian factor.
template <class T>
CombinedSeries<T> dac_initial_layer(const std::vector<T> &g_taylor,
                                    const std::vector<T> &c_series, int N, int M);

// ---- control parameter (canard value) ----

template <class T> struct CanardSeries {
    std::vector<T> alpha;            // alpha(eps) ~ sum alpha_n eps^n
    std::vector<std::vector<T>> y;   // outer coefficients y_n, pole-free at 0
};

// Formal recursion: alpha_n chosen so each y_{n+1} stays pole-free (p = 2).
template <class T> CanardSeries<T> canard_alpha(const std::vector<T> &g_taylor, int N);

// Expansion of the solution bounded on all of R for the controlled equation
// (p = 2): the forcing g + alpha(eps) is linear, and the constant part
// alpha_k eps^k contributes alpha_k eta^{2k+1} U on the chosen ray.
template <class T>
CombinedSeries<T> dac_controlled_linear(const std::vector<T> &g_taylor, int ray, int N, int M);

// alpha(eps) by quadrature of the two-sided boundedness condition.
double canard_alpha_numeric(const ParsedFunction &g, int p, double eps,
                            const QuadConfig &cfg = QuadConfig());

// ---- quasi-linear turning point ----

// Trivariate jet of P(x, y, eps): coeffs[j][k][l] multiplies x^j y^k eps^l.
template <class T> using TriJet = std::vector<std::vector<std::vector<T>>>;

template <class T> struct QuasilinearResult {
    CombinedSeries<T> dac;
    std::vector<FastExpr<T>> inner; // V_n, the full inner coefficients
};

template <class T>
QuasilinearResult<T> quasilinear_dac(const TriJet<T> &P, int p, int ray, int N, int M,
                                     const QuadConfig &cfg = QuadConfig());

// Canard-moment condition: I_n = int e^{-s^p} G_n^+(s) ds for the inner
// recursion of eps y' = p x^{p-1} y + eps P; all I_n ~ 0 is the formal canard
// criterion at order N.
template <class T>
std::vector<double> canard_moments(const TriJet<T> &P, int p, int N,
                                   const QuadConfig &cfg = QuadConfig());

// ---- Union-Jack reduced inner shooting ----

struct ShootResult {
    double c_value = 0;
    std::vector<std::pair<double, double>> bracket_history; // (lo, hi) per step
    std::vector<std::pair<double, int>> classifications;    // (c, +1 up / -1 down-or-settled)
    std::vector<std::pair<double, double>> trajectory;      // samples at c_value
};

ShootResult canard_value_shoot(double tol, double x_far = 10.0);

// ---- Ackerberg-O'Malley resonance ----

struct RiccatiSample {
    std::vector<std::pair<double, double>> samples;
    bool hit_pole = false;
    double pole_location = 0;
};

// Decaying solution of dY/dX = alpha X^{p-1} Y - beta X^{p-2} - Y^2 at the
// chosen ray, integrated backward from asymptotic data Y ~ (beta/alpha)/X.
RiccatiSample riccati_fast_leading(double alpha, double beta, int p, int ray,
                                   const std::vector<double> &grid);

struct ResonanceResult {
    Rational D;
    bool resonant = false;
    std::string detail;
    std::optional<int> witness;          // failing recurrence index
    std::vector<Rational> Z0;            // polynomial coefficients, degree D
};

ResonanceResult resonance_check(const Rational &alpha, const Rational &beta, int p);

} // namespace dacx

#include "dacx/solvers_impl.hpp"
