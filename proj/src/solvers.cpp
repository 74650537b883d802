#include "dacx/solvers.hpp"

#include <algorithm>
#include <cmath>

#include "dacx/quad.hpp"

namespace dacx {

double canard_alpha_numeric(const ParsedFunction &g, int p, double eps, const QuadConfig &cfg) {
    if (p < 2 || p % 2 != 0)
        throw domain_error("canard_alpha_numeric: even p >= 2 required");
    // alpha(eps) = -int e^{-t^p/eps} g / int e^{-t^p/eps}, via t = eps^{1/p} s
    double scale = std::pow(eps, 1.0 / p);
    double S = std::pow(45.0, 1.0 / p) + 1.0;
    auto num = [&](double s) { return std::exp(-std::pow(s, (double)p)) * g.eval(scale * s); };
    auto den = [&](double s) { return std::exp(-std::pow(s, (double)p)); };
    double In = integrate_gk(num, -S, S, cfg.abs_tol, cfg.max_depth);
    double Id = integrate_gk(den, -S, S, cfg.abs_tol, cfg.max_depth);
    if (!std::isfinite(In) || !std::isfinite(Id) || Id == 0)
        throw domain_error("canard_alpha_numeric: boundedness integrals diverge");
    return -In / Id;
}

namespace {

// +1: escaped upward before x_far; -1: settled or stayed bounded.
int classify_shot(double c, double x_far, std::vector<std::pair<double, double>> *traj) {
    auto field = [c](double X, double Y) { return Y * (Y - X) * (Y + X) + c; };
    double y0 = c / (x_far * x_far) + 2 * c / std::pow(x_far, 5.0);
    int verdict = -1;
    double sample_step = 2 * x_far / 400.0;
    double next_sample = -x_far;
    auto watch = [&](double X, double Y) {
        if (traj && X >= next_sample) {
            traj->push_back({X, Y});
            next_sample += sample_step;
        }
        if (std::abs(Y) > 10.0 * (std::abs(X) + 1.0)) {
            verdict = Y > 0 ? +1 : -1;
            return true;
        }
        return false;
    };
    OdeOptions opts;
    opts.rel_tol = 1e-10;
    opts.abs_tol = 1e-12;
    try {
        integrate_ode(field, -x_far, y0, x_far, opts, watch);
    } catch (const numeric_error &) {
        // step collapse at a finite-time blow-up counts as an escape
        verdict = verdict == 0 ? -1 : verdict;
    }
    return verdict;
}

} // namespace

ShootResult canard_value_shoot(double tol, double x_far) {
    if (tol < 1e-10)
        throw domain_error("canard_value_shoot: tolerance below 1e-10 is not supported");
    ShootResult out;
    double lo = 0.0, hi = 1.0;
    int clo = classify_shot(lo, x_far, nullptr);
    int chi = classify_shot(hi, x_far, nullptr);
    out.classifications.push_back({lo, clo});
    out.classifications.push_back({hi, chi});
    if (clo != -1 || chi != +1)
        throw domain_error("canard_value_shoot: no sign change in (0,1); "
                           "vector field implementation suspect");
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        int cm = classify_shot(mid, x_far, nullptr);
        out.classifications.push_back({mid, cm});
        (cm == +1 ? hi : lo) = mid;
        out.bracket_history.push_back({lo, hi});
    }
    out.c_value = 0.5 * (lo + hi);
    classify_shot(out.c_value, x_far, &out.trajectory);
    return out;
}

RiccatiSample riccati_fast_leading(double alpha, double beta, int p, int ray,
                                   const std::vector<double> &grid) {
    if (alpha <= 0)
        throw domain_error("riccati_fast_leading: alpha > 0 required");
    RiccatiSample out;
    double D = beta / alpha;
    double far = 30.0;
    auto field = [&](double X, double Y) {
        return alpha * std::pow(X, (double)(p - 1)) * Y - beta * std::pow(X, (double)(p - 2)) -
               Y * Y;
    };
    std::vector<double> pts = grid;
    std::sort(pts.begin(), pts.end());
    if (ray > 0)
        std::reverse(pts.begin(), pts.end()); // integrate inward from +infinity
    double x0 = ray > 0 ? far : -far;
    double y0 = D / x0 + D * (D - 1) / (alpha * std::pow(x0, (double)(p + 1)));
    double x = x0, y = y0;
    OdeOptions opts;
    opts.rel_tol = 1e-11;
    opts.abs_tol = 1e-12;
    for (double target : pts) {
        if ((ray > 0 && target > far) || (ray < 0 && target < -far))
            throw domain_error("riccati_fast_leading: grid point beyond the starting ray");
        bool blew = false;
        auto watch = [&](double X, double Y) {
            if (std::abs(Y) > 1e8) {
                out.hit_pole = true;
                out.pole_location = X;
                blew = true;
                return true;
            }
            return false;
        };
        try {
            y = integrate_ode(field, x, y, target, opts, watch);
        } catch (const numeric_error &) {
            out.hit_pole = true;
            out.pole_location = x;
            blew = true;
        }
        if (blew)
            break;
        x = target;
        out.samples.push_back({x, y});
    }
    return out;
}

ResonanceResult resonance_check(const Rational &alpha, const Rational &beta, int p) {
    if (alpha.is_zero())
        throw domain_error("resonance_check: alpha must be nonzero");
    ResonanceResult out;
    out.D = beta / alpha;
    if (out.D.sign() < 0 || !(out.D.den() == BigInt(1)) || !out.D.num().fits_int64()) {
        out.resonant = false;
        out.detail = "D = beta/alpha is not a nonnegative integer";
        return out;
    }
    long long D = out.D.num().to_int64();
    int k0 = (int)(D % p);
    if (k0 != 0 && k0 != 1) {
        // The descending coefficient chain from degree D reaches index k0 with
        // a nonzero value, where the equation demands k0 (k0 - 1) z_{k0} = 0.
        out.resonant = false;
        out.witness = k0;
        out.detail = "D = " + std::to_string(D) + " is congruent to " + std::to_string(k0) +
                     " mod " + std::to_string(p) + "; recurrence fails to close at index " +
                     std::to_string(k0);
        return out;
    }
    out.resonant = true;
    out.Z0.assign((size_t)D + 1, Rational(0));
    out.Z0[(size_t)D] = Rational(1);
    for (long long k = D - p; k >= 0; k -= p) {
        // (k+p)(k+p-1) z_{k+p} + (beta - alpha k) z_k = 0
        Rational denom = alpha * Rational(k) - beta;
        out.Z0[(size_t)k] =
            Rational((k + p) * (k + p - 1)) * out.Z0[(size_t)(k + p)] / denom;
    }
    out.detail = "resonant: D = " + std::to_string(D) + " == " + std::to_string(k0) + " mod " +
                 std::to_string(p) + ", Z0 has degree " + std::to_string(D);
    return out;
}

} // namespace dacx
