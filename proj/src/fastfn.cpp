#include "dacx/fastfn_core.hpp"

#include <algorithm>
#include <cmath>

#include "dacx/errors.hpp"

namespace dacx {

std::vector<double> u_tail_double(int p, int j, int M) {
    std::vector<double> u((size_t)M + 1, 0.0); // index by slot, u[m] ~ X^{-m}
    if (p - j >= 1 && p - j <= M)
        u[(size_t)(p - j)] = -1.0 / p;
    for (int m = 1; m + p <= M; ++m)
        u[(size_t)(m + p)] = -(double)m / p * u[(size_t)m];
    return std::vector<double>(u.begin() + 1, u.end());
}

std::vector<double> dawson_tail_double(int p, int M) {
    std::vector<double> u((size_t)M + 1, 0.0);
    if (p - 1 >= 1 && p - 1 <= M)
        u[(size_t)(p - 1)] = 1.0 / p;
    for (int m = 1; m + p <= M; ++m)
        u[(size_t)(m + p)] = (double)m / p * u[(size_t)m];
    return std::vector<double>(u.begin() + 1, u.end());
}

double tail_sum_optimal(const std::vector<double> &tail, double X, double &err_bound) {
    double xi = 1.0 / X, acc = xi, sum = 0.0;
    double best = HUGE_VAL;
    for (size_t m = 0; m < tail.size(); ++m) {
        double term = tail[m] * acc;
        double mag = std::abs(term);
        if (mag != 0.0 && mag > best) { // past the smallest term: stop
            err_bound = mag;
            return sum;
        }
        if (mag != 0.0)
            best = mag;
        sum += term;
        acc *= xi;
    }
    err_bound = best == HUGE_VAL ? 0.0 : best * std::abs(xi);
    return sum;
}

double tail_switch_point(const std::vector<double> &tail, double abs_tol) {
    for (double s = 2.0; s < 12.0; s += 0.25) {
        double err = HUGE_VAL, xi = 1.0 / s, acc = xi;
        double best = HUGE_VAL;
        for (double c : tail) {
            double mag = std::abs(c) * acc;
            if (mag != 0.0)
                best = std::min(best, mag);
            acc *= xi;
        }
        err = best;
        if (err < abs_tol)
            return s;
    }
    return 12.0;
}

namespace {

// Lower truncation point for int_{-inf}^{X} exp(X^p - T^p) |T|^d dT: weight
// relative to its maximum on the range falls below cfg.ray_weight_floor.
double ray_cutoff(int p, double X, int growth_deg, const QuadConfig &cfg) {
    double lambda = -std::log(cfg.ray_weight_floor) + 10.0;
    double base = std::max(std::pow(std::abs(X), (double)p), 0.0);
    double t = std::pow(base + lambda, 1.0 / p);
    // one refinement for polynomial growth of the integrand
    t = std::pow(base + lambda + growth_deg * std::log(2.0 + t), 1.0 / p);
    return -t;
}

} // namespace

namespace {

// Defining integral on the convergent ray: weight e^{X^p - T^p} stays bounded
// because T^p >= is not guaranteed, only capped by the overflow guard.
double u_eval_ray_direct(int p, int j, int ray, double X, const QuadConfig &cfg) {
    double Xp = std::pow(X, (double)p);
    if (Xp > 690.0 && ((ray < 0 && X > 0) || (ray > 0 && X < 0)))
        throw domain_error("u_eval: exponentially large regime (repulsive side)");
    static thread_local std::vector<double> tail_cache;
    static thread_local int cache_p = -1, cache_j = -1;
    if (cache_p != p || cache_j != j) {
        tail_cache = u_tail_double(p, j, 220);
        cache_p = p;
        cache_j = j;
    }
    double sw = tail_switch_point(tail_cache, cfg.abs_tol);
    if ((ray < 0 && X <= -sw) || (ray > 0 && X >= sw)) {
        double err = 0;
        double v = tail_sum_optimal(tail_cache, X, err);
        if (err > 10 * cfg.abs_tol)
            throw numeric_error("u_eval: tail summation lost accuracy");
        return v;
    }
    auto f = [&](double T) {
        return std::exp(Xp - std::pow(T, (double)p)) * std::pow(T, (double)(j - 1));
    };
    double cut = ray_cutoff(p, X, j - 1, cfg);
    if (ray < 0)
        return integrate_gk(f, cut, X, cfg.abs_tol, cfg.max_depth);
    return -integrate_gk(f, X, -cut, cfg.abs_tol, cfg.max_depth);
}

} // namespace

double u_eval_core(int p, int j, int ray, double X, const QuadConfig &cfg) {
    if (p % 2 == 1 && ray < 0)
        throw domain_error("u_eval: '-' ray does not converge for odd p");
    return u_eval_ray_direct(p, j, ray, X, cfg);
}

double dawson_eval(int p, double X, const QuadConfig &cfg) {
    // Odd in X for even p; reduce to X >= 0.
    if (p % 2 == 0 && X < 0)
        return -dawson_eval(p, -X, cfg);
    if (X == 0)
        return 0;
    static thread_local std::vector<double> tail_cache;
    static thread_local int cache_p = -1;
    if (cache_p != p) {
        tail_cache = dawson_tail_double(p, 220);
        cache_p = p;
    }
    double sw = tail_switch_point(tail_cache, cfg.abs_tol);
    if (X >= sw) {
        double err = 0;
        double v = tail_sum_optimal(tail_cache, X, err);
        if (err > 10 * cfg.abs_tol)
            throw numeric_error("dawson_eval: tail summation lost accuracy");
        return v;
    }
    double Xp = std::pow(X, (double)p);
    double lo = std::max(0.0, std::pow(std::max(Xp - 50.0, 0.0), 1.0 / p));
    auto f = [&](double T) { return std::exp(std::pow(T, (double)p) - Xp); };
    return integrate_gk(f, lo, X, cfg.abs_tol, cfg.max_depth);
}

double japply_eval_core(int p, int ray, const std::function<double(double)> &v,
                        int growth_deg, double X, const QuadConfig &cfg) {
    if (p % 2 == 1 && ray < 0)
        throw domain_error("j_apply: '-' ray does not converge for odd p");
    double Xp = std::pow(X, (double)p);
    if (Xp > 690.0 && ((ray < 0 && X > 0) || (ray > 0 && X < 0)))
        throw domain_error("j_apply: exponentially large regime (repulsive side)");
    auto f = [&](double T) { return std::exp(Xp - std::pow(T, (double)p)) * v(T); };
    double cut = ray_cutoff(p, X, growth_deg, cfg);
    double val = ray < 0 ? integrate_gk(f, cut, X, cfg.abs_tol, cfg.max_depth)
                         : -integrate_gk(f, X, -cut, cfg.abs_tol, cfg.max_depth);
    if (std::isnan(val) || std::isinf(val))
        throw domain_error("j_apply: integrand not integrable along the ray");
    return val;
}

} // namespace dacx
