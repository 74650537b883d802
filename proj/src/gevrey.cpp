#include "dacx/gevrey.hpp"

#include <cmath>

#include "dacx/errors.hpp"
#include "dacx/quad.hpp"

namespace dacx {

namespace {

struct FitAtP {
    double logC = 0, logL1 = 0, sse = HUGE_VAL, residual = HUGE_VAL;
};

// Least squares of log norms against log C + n log L1 + lgamma(n/p + 1).
FitAtP fit_fixed_p(const std::vector<std::pair<int, double>> &samples, double p) {
    double s0 = 0, sn = 0, snn = 0, sy = 0, sny = 0;
    for (auto [n, lognorm] : samples) {
        double y = lognorm - std::lgamma(n / p + 1.0);
        s0 += 1;
        sn += n;
        snn += (double)n * n;
        sy += y;
        sny += n * y;
    }
    double det = s0 * snn - sn * sn;
    if (det == 0)
        return {};
    FitAtP f;
    f.logC = (snn * sy - sn * sny) / det;
    f.logL1 = (s0 * sny - sn * sy) / det;
    f.sse = 0;
    f.residual = 0;
    for (auto [n, lognorm] : samples) {
        double model = f.logC + n * f.logL1 + std::lgamma(n / p + 1.0);
        double d = lognorm - model;
        f.sse += d * d;
        f.residual = std::max(f.residual, std::abs(d));
    }
    return f;
}

} // namespace

GevreyEstimate gevrey_fit(const std::vector<double> &norms, std::optional<double> p_hint) {
    std::vector<std::pair<int, double>> samples;
    for (size_t n = 0; n < norms.size(); ++n)
        if (norms[n] > 0 && std::isfinite(norms[n]))
            samples.push_back({(int)n, std::log(norms[n])});
    if (samples.size() < 6)
        throw domain_error("gevrey_fit: need at least 6 nonzero norms");

    auto eval = [&](double p) { return fit_fixed_p(samples, p); };
    double best_p = 1;
    FitAtP best;
    if (p_hint) {
        best_p = *p_hint;
        best = eval(best_p);
    } else {
        for (int p = 1; p <= 6; ++p) {
            FitAtP f = eval((double)p);
            if (f.sse < best.sse) {
                best = f;
                best_p = p;
            }
        }
        // golden-section refinement around the best grid point
        double a = std::max(0.5, best_p - 0.9), b = best_p + 0.9;
        const double gr = 0.6180339887498949;
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = eval(x1).sse, f2 = eval(x2).sse;
        for (int it = 0; it < 50; ++it) {
            if (f1 < f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = eval(x1).sse;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = eval(x2).sse;
            }
        }
        double p_ref = 0.5 * (a + b);
        FitAtP f_ref = eval(p_ref);
        if (f_ref.sse <= best.sse) {
            best = f_ref;
            best_p = p_ref;
        }
    }
    GevreyEstimate out;
    out.p = best_p;
    out.C = std::exp(best.logC);
    out.L1 = std::exp(best.logL1);
    out.L2 = 1;
    out.residual = best.residual;
    return out;
}

TailCheckReport gevrey_tail_check(const std::vector<FastCoefficient<double>> &fams, double C,
                                  double L1, double L2, int p, const std::vector<double> &grid,
                                  const QuadConfig &cfg) {
    TailCheckReport rep;
    for (size_t n = 0; n < fams.size(); ++n) {
        const auto &f = fams[n];
        if (f.is_zero())
            continue;
        if (!f.expr)
            throw domain_error("gevrey_tail_check: fast coefficient lacks an evaluable form");
        int Mmax = f.tail.order();
        for (double X : grid) {
            double val = f.expr->eval(X, cfg);
            double partial = 0;
            for (int M = 0; M <= Mmax; ++M) {
                double rem = std::abs(val - partial) * std::pow(std::abs(X), (double)M);
                double bound = C * std::pow(L1, (double)n) * std::pow(L2, (double)M) *
                               std::exp(std::lgamma((M + (double)n) / p + 1.0));
                double ratio = rem / bound;
                if (ratio > rep.worst_ratio) {
                    rep.worst_ratio = ratio;
                    rep.worst_n = (int)n;
                    rep.worst_M = M;
                    rep.worst_X = X;
                }
                if (M < Mmax)
                    partial += f.tail.coeff(M + 1) * std::pow(X, -(double)(M + 1));
            }
        }
    }
    rep.pass = rep.worst_ratio <= 1.0;
    return rep;
}

TruncationPlan optimal_truncate(const GevreyEstimate &est, int available_order, double eta) {
    TruncationPlan plan;
    double raw = est.p * std::pow(1.0 / (eta * est.L1), est.p);
    long n = std::lround(raw);
    n = std::max(1l, std::min(n, (long)available_order));
    plan.n_star = (int)n;
    plan.exponent_A = std::pow(est.L1, -est.p);
    // first-omitted-term envelope at the chosen order; the residual lifts the
    // central fit constant to an upper envelope
    double c_env = est.C * std::exp(est.residual);
    plan.remainder_bound = c_env * std::pow(est.L1, (double)n) *
                           std::exp(std::lgamma(n / est.p + 1.0)) * std::pow(eta, (double)n);
    return plan;
}

namespace {

// Borel coefficients b_n = a_n / Gamma(n/p+1), computed in log space.
std::vector<double> borel_coeffs(const std::vector<double> &a, int p) {
    std::vector<double> b(a.size(), 0.0);
    for (size_t n = 0; n < a.size(); ++n) {
        if (a[n] == 0)
            continue;
        double lg = std::log(std::abs(a[n])) - std::lgamma((double)n / p + 1.0);
        b[n] = (a[n] > 0 ? 1.0 : -1.0) * std::exp(lg);
    }
    return b;
}

double radius_estimate(const std::vector<double> &b) {
    // root test on the tail half of the available coefficients
    double inv = 0;
    size_t start = std::max<size_t>(2, b.size() / 2);
    for (size_t n = start; n < b.size(); ++n)
        if (b[n] != 0)
            inv = std::max(inv, std::pow(std::abs(b[n]), 1.0 / (double)n));
    return inv > 0 ? 1.0 / inv : 1e6;
}

} // namespace

double borel_laplace(const std::vector<double> &coeffs, int p, const BorelSumConfig &cfg,
                     double eta, bool *gevrey_warning) {
    if (coeffs.empty())
        return 0;
    if (gevrey_warning) {
        *gevrey_warning = false;
        if (coeffs.size() >= 8) {
            try {
                std::vector<double> mags;
                for (double a : coeffs)
                    mags.push_back(std::abs(a));
                GevreyEstimate est = gevrey_fit(mags, (double)p);
                *gevrey_warning = est.residual > 3.0;
            } catch (const error &) {
                *gevrey_warning = true;
            }
        }
    }
    std::vector<double> b = borel_coeffs(coeffs, p);
    double rad = radius_estimate(b);
    double T = cfg.truncation_radius;
    if (T <= 0)
        T = std::min(0.9 * rad, 8.0 * eta * std::pow(45.0, 1.0 / p));
    if (T >= rad)
        throw schema_error("borel_laplace: truncation radius exceeds the Borel radius estimate");
    auto acheck = [&](double t) {
        double s = 0, tn = 1;
        for (double bn : b) {
            s += bn * tn;
            tn *= t;
        }
        return s;
    };
    auto f = [&](double t) {
        double w = std::exp(-std::pow(t / eta, (double)p));
        return w * acheck(t) * p * std::pow(t, (double)(p - 1));
    };
    return integrate_gk(f, 0, T, cfg.quad_tol, 26) / std::pow(eta, (double)p);
}

std::vector<FastExpr<double>> synth_tails(const std::vector<std::vector<double>> &rows, int p,
                                          double C, double L1, double L2) {
    // growth precondition: |g_nm| <= C L1^n L2^m Gamma((m+n)/p + 1)
    for (size_t n = 0; n < rows.size(); ++n)
        for (size_t i = 0; i < rows[n].size(); ++i) {
            int m = (int)i + 1;
            double bound = C * std::pow(L1, (double)n) * std::pow(L2, (double)m) *
                           std::exp(std::lgamma((m + (double)n) / p + 1.0));
            if (std::abs(rows[n][i]) > bound * (1 + 1e-12))
                throw schema_error("synth_tails: coefficient bound violated at (n=" +
                                   std::to_string(n) + ", m=" + std::to_string(m) + ")");
        }
    double rho = 0.9 / L2;
    std::vector<FastExpr<double>> out;
    for (size_t n = 0; n < rows.size(); ++n) {
        const auto &row = rows[n];
        bool zero = true;
        for (double v : row)
            zero = zero && v == 0;
        if (zero) {
            out.push_back(FastExpr<double>::zero());
            continue;
        }
        // t-polynomial sum_m g_{n,m-n} t^m / Gamma(m/p+1), m = n+1 .. n+len
        std::vector<double> tc(row.size(), 0.0);
        int m0 = (int)n + 1;
        for (size_t i = 0; i < row.size(); ++i)
            tc[i] = row[i] / std::exp(std::lgamma((double)(m0 + (int)i) / p + 1.0));
        out.push_back(FastExpr<double>::borel_kernel(p, (int)n, tc, m0, rho,
                                                     std::vector<double>(row)));
    }
    return out;
}

} // namespace dacx
