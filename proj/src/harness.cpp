#include "dacx/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#include "dacx/ode.hpp"
#include "dacx/quad.hpp"
#include "dacx/solvers.hpp"

#include "json.hpp"

namespace dacx {

void parallel_for(int n, const std::function<void(int)> &body) {
    int hw = (int)std::thread::hardware_concurrency();
    if (const char *env = std::getenv("DACX_THREADS"))
        hw = std::max(1, std::atoi(env));
    int workers = std::max(1, std::min(hw, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error = nullptr;
    std::mutex err_mx;
    auto run = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= n)
                return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mx);
                if (!first_error)
                    first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back(run);
    for (auto &t : pool)
        t.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

std::vector<double> build_grid(const GridSpec &grid, double eta, bool half_line_kind) {
    std::vector<double> pts;
    double hi = grid.x_hi;
    if (half_line_kind && !grid.include_repulsive)
        hi = std::min(hi, 0.0);
    int n = std::max(2, grid.outer_samples);
    for (int i = 0; i < n; ++i)
        pts.push_back(grid.x_lo + (hi - grid.x_lo) * i / (n - 1));
    int inner_half = (int)std::ceil(grid.K);
    for (int i = -inner_half; i <= inner_half; ++i) {
        double X = grid.K * (double)i / std::max(1, inner_half);
        pts.push_back(X * eta);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-14; }),
              pts.end());
    return pts;
}

namespace {

// int_{ray inf}^x exp((x^p - t^p)/eps) w(t) dt with the stable kernel form.
double halfline_integral(int p, int ray, double eps, double x,
                         const std::function<double(double)> &w, const QuadConfig &cfg) {
    double xp = std::pow(x, (double)p);
    if (xp / eps > 690.0 && ((ray < 0 && x > 0) || (ray > 0 && x < 0)))
        throw domain_error("reference_solution: exponentially large regime "
                           "(repulsive side beyond validity)");
    double lambda = 48.0 * eps;
    double cut = std::pow(std::max(xp, 0.0) + lambda, 1.0 / p);
    auto f = [&](double t) {
        return std::exp((xp - std::pow(t, (double)p)) / eps) * w(t);
    };
    if (ray < 0)
        return integrate_gk(f, -cut, x, cfg.abs_tol, cfg.max_depth);
    return -integrate_gk(f, x, cut, cfg.abs_tol, cfg.max_depth);
}

} // namespace

double reference_solution(const EquationSpec &spec, int ray, double eps, double x,
                          const QuadConfig &cfg) {
    if (eps <= 0)
        throw domain_error("reference_solution: eps must be positive");
    switch (spec.kind) {
    case EquationKind::LinearModel: {
        auto w = [&](double t) { return spec.g->eval(t); };
        return halfline_integral(spec.p, ray, eps, x, w, cfg);
    }
    case EquationKind::ControlledLinear: {
        double alpha = canard_alpha_numeric(*spec.g, spec.p, eps, cfg);
        auto w = [&](double t) { return alpha + spec.g->eval(t); };
        return halfline_integral(spec.p, ray, eps, x, w, cfg);
    }
    case EquationKind::LinearRepulsiveAttractive: {
        // y = e^{-x^2/eps} int_0^x e^{t^2/eps} g dt + c(eps) e^{-x^2/eps}
        double eta = std::sqrt(eps);
        double ceps = 0, etap = 1;
        for (double cn : spec.c_series) {
            ceps += cn * etap;
            etap *= eta;
        }
        auto f = [&](double t) {
            return std::exp((t * t - x * x) / eps) * spec.g->eval(t);
        };
        double v = x >= 0 ? integrate_gk(f, 0, x, cfg.abs_tol, cfg.max_depth)
                          : -integrate_gk(f, x, 0, cfg.abs_tol, cfg.max_depth);
        return v + ceps * std::exp(-x * x / eps);
    }
    case EquationKind::QuasiLinear: {
        // stiff integration from the attractive far end of the requested side
        double base = ray < 0 ? -1.5 : 1.5;
        auto f = [&](double t, double y) {
            return spec.p * std::pow(t, (double)(spec.p - 1)) * y / eps +
                   spec.P->eval3(t, y, eps);
        };
        OdeOptions opts;
        opts.rel_tol = 1e-11;
        opts.abs_tol = 1e-13;
        opts.h_init = 1e-5;
        return integrate_ode(f, base, 0.0, x, opts);
    }
    case EquationKind::UnionJackInner: {
        auto f = [&](double X, double Y) { return Y * (Y - X) * (Y + X) + spec.c; };
        double far = 10.0;
        double y0 = spec.c / (far * far) + 2 * spec.c / std::pow(far, 5.0);
        OdeOptions opts;
        opts.rel_tol = 1e-10;
        opts.abs_tol = 1e-12;
        return integrate_ode(f, -far, y0, x, opts);
    }
    case EquationKind::ResonancePair:
        throw domain_error("reference_solution: resonance pairs have no scalar reference");
    }
    throw domain_error("reference_solution: unknown equation kind");
}

ValidationReport error_sweep(const EquationSpec &spec, int ray,
                             const CombinedSeries<double> &dac, const GridSpec &grid,
                             const std::vector<int> &n_list, const SweepOptions &opts,
                             const QuadConfig &cfg) {
    bool half_line = spec.kind == EquationKind::LinearModel ||
                     spec.kind == EquationKind::ControlledLinear ||
                     spec.kind == EquationKind::QuasiLinear;
    ValidationReport rep;
    for (double eta : grid.eta_list) {
        double eps = std::pow(eta, (double)dac.p());
        std::vector<double> pts = build_grid(grid, eta, half_line);
        std::vector<double> ref(pts.size());
        parallel_for((int)pts.size(), [&](int i) {
            ref[(size_t)i] = reference_solution(spec, ray, eps, pts[(size_t)i], cfg);
        });
        for (int N : n_list) {
            auto t0 = std::chrono::steady_clock::now();
            std::vector<double> err(pts.size());
            parallel_for((int)pts.size(), [&](int i) {
                double approx = dac.eval_partial(pts[(size_t)i], eta, N, cfg);
                err[(size_t)i] = std::abs(ref[(size_t)i] - approx);
            });
            SweepRow row;
            row.eta = eta;
            row.n_terms = N;
            row.sup_error = *std::max_element(err.begin(), err.end());
            row.wall_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
            rep.rows.push_back(row);
        }
    }
    // per-N log-log fit of sup_error against eta
    for (int N : n_list) {
        std::vector<std::pair<double, double>> pts; // (log eta, log err)
        for (const auto &r : rep.rows)
            if (r.n_terms == N && r.sup_error > 0)
                pts.push_back({std::log(r.eta), std::log(r.sup_error)});
        std::sort(pts.begin(), pts.end());
        if (opts.drop_largest_eta && pts.size() > 2)
            pts.pop_back();
        OrderFit fit;
        fit.n_terms = N;
        double max_err = 0;
        for (const auto &r : rep.rows)
            if (r.n_terms == N)
                max_err = std::max(max_err, r.sup_error);
        if (pts.size() >= 2) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0, n = (double)pts.size();
            for (auto [lx, ly] : pts) {
                sx += lx;
                sy += ly;
                sxx += lx * lx;
                sxy += lx * ly;
            }
            double det = n * sxx - sx * sx;
            fit.slope = (n * sxy - sx * sy) / det;
            double icpt = (sy - fit.slope * sx) / n;
            double ss = 0;
            for (auto [lx, ly] : pts) {
                double d = ly - (icpt + fit.slope * lx);
                ss += d * d;
            }
            double denom = 0;
            double xbar = sx / n;
            for (auto [lx, ly] : pts)
                denom += (lx - xbar) * (lx - xbar);
            fit.slope_stderr =
                pts.size() > 2 ? std::sqrt(ss / ((n - 2) * denom)) : 0.0;
        }
        rep.fits.push_back(fit);
        Verdict v;
        v.name = "order_" + std::to_string(N);
        if (max_err < opts.noise_floor) {
            v.pass = true;
            v.note = "errors at the noise floor; expansion exact to machine precision";
        } else {
            v.pass = std::abs(fit.slope - N) <= opts.slope_tol;
            v.note = "fitted slope " + std::to_string(fit.slope);
        }
        rep.verdicts.push_back(v);
    }
    return rep;
}

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const OrderFit *fit_for(const ValidationReport &rep, int N) {
    for (const auto &f : rep.fits)
        if (f.n_terms == N)
            return &f;
    return nullptr;
}

} // namespace

void emit_report(const ValidationReport &report, const std::string &path, ReportFormat format) {
    std::ofstream out(path);
    if (!out)
        throw schema_error("emit_report: cannot open '" + path + "' for writing");
    if (format == ReportFormat::Csv) {
        out << "eta,N,sup_error,fit_slope,fit_stderr,wall_ms\n";
        for (const auto &r : report.rows) {
            const OrderFit *f = fit_for(report, r.n_terms);
            out << fmt17(r.eta) << ',' << r.n_terms << ',' << fmt17(r.sup_error) << ','
                << fmt17(f ? f->slope : 0.0) << ',' << fmt17(f ? f->slope_stderr : 0.0) << ','
                << fmt17(r.wall_ms) << '\n';
        }
    } else {
        nlohmann::json j;
        j["schema"] = "dacx-report/1";
        j["rows"] = nlohmann::json::array();
        for (const auto &r : report.rows) {
            const OrderFit *f = fit_for(report, r.n_terms);
            j["rows"].push_back({{"eta", r.eta},
                                 {"N", r.n_terms},
                                 {"sup_error", r.sup_error},
                                 {"fit_slope", f ? f->slope : 0.0},
                                 {"fit_stderr", f ? f->slope_stderr : 0.0},
                                 {"wall_ms", r.wall_ms}});
        }
        j["verdicts"] = nlohmann::json::array();
        for (const auto &v : report.verdicts)
            j["verdicts"].push_back({{"name", v.name}, {"pass", v.pass}, {"note", v.note}});
        out << j.dump(2) << '\n';
    }
    if (!out)
        throw schema_error("emit_report: write to '" + path + "' failed");
}

} // namespace dacx
