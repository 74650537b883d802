#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dacx/gevrey.hpp"
#include "dacx/harness.hpp"
#include "dacx/problem.hpp"
#include "dacx/solvers.hpp"

namespace {

using namespace dacx;

CombinedSeries<double> build_dac(const ProblemFile &p) {
    switch (p.spec.kind) {
    case EquationKind::LinearModel: {
        int need = p.M + p.spec.p * (p.N / p.spec.p + 1);
        return dac_linear_model<double>(p.spec.g->taylor(need), p.spec.p, p.ray, p.N, p.M);
    }
    case EquationKind::ControlledLinear: {
        if (p.spec.p != 2)
            throw schema_error("controlled-linear expansion builder requires p = 2");
        int need = p.M + 2 * (p.N / 2 + 1) + p.N;
        return dac_controlled_linear<double>(p.spec.g->taylor(need), p.ray, p.N, p.M);
    }
    case EquationKind::LinearRepulsiveAttractive: {
        int need = p.M + 2 * (p.N / 2 + 1);
        return dac_initial_layer<double>(p.spec.g->taylor(need), p.spec.c_series, p.N, p.M);
    }
    case EquationKind::QuasiLinear: {
        int ord = std::max(p.N + 2, 4);
        return quasilinear_dac<double>(p.spec.P->taylor3(ord), p.spec.p, p.ray, p.N, p.M,
                                       p.quad)
            .dac;
    }
    default:
        throw schema_error("this problem kind has no combined-expansion builder");
    }
}

double level_norm(const CombinedSeries<double> &dac, int n, const QuadConfig &cfg) {
    double slow = 0, acc = 0;
    for (const auto &c : dac.slow(n).c) {
        acc = std::abs(c);
        slow += acc;
    }
    double fast = 0;
    const auto &f = dac.fast(n);
    if (f.expr && !f.expr->is_zero())
        fast = std::abs(f.expr->eval(0.0, cfg));
    for (const auto &c : f.tail.c)
        fast = std::max(fast, std::abs(c));
    return std::max(slow, fast);
}

std::vector<double> read_numbers(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw schema_error("cannot open '" + path + "'");
    std::vector<double> v;
    double x;
    while (in >> x)
        v.push_back(x);
    return v;
}

int run_expand(const std::string &problem_path, const std::string &out_path) {
    ProblemFile p = ProblemFile::load(problem_path);
    CombinedSeries<double> dac = build_dac(p);
    nlohmann::json j = expansion_to_json(dac);
    if (out_path.empty() || out_path == "-") {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out)
            throw schema_error("cannot open '" + out_path + "' for writing");
        out << j.dump(2) << "\n";
        std::cout << "expansion: p=" << dac.p() << " N=" << dac.eta_order()
                  << " M=" << dac.slow_order() << " -> " << out_path << "\n";
    }
    return 0;
}

int run_eval(const std::string &problem_path, const std::string &expansion_path, double eta,
             int n_terms, const std::vector<double> &at) {
    ProblemFile p = ProblemFile::load(problem_path);
    CombinedSeries<double> dac;
    if (expansion_path.empty()) {
        dac = build_dac(p);
    } else {
        std::ifstream in(expansion_path);
        if (!in)
            throw schema_error("cannot open expansion '" + expansion_path + "'");
        nlohmann::json j;
        in >> j;
        dac = expansion_from_json<double>(j);
    }
    if (n_terms <= 0)
        n_terms = dac.eta_order();
    std::vector<double> pts = at;
    if (pts.empty()) {
        bool half_line = p.spec.kind != EquationKind::LinearRepulsiveAttractive;
        pts = build_grid(p.grid, eta, half_line);
    }
    for (double x : pts)
        std::printf("%.17g %.17g\n", x, dac.eval_partial(x, eta, n_terms, p.quad));
    return 0;
}

int run_validate(const std::string &problem_path) {
    ProblemFile p = ProblemFile::load(problem_path);
    if (p.grid.eta_list.empty())
        throw schema_error("validate: problem file needs a nonempty eta_list");
    CombinedSeries<double> dac = build_dac(p);
    ValidationReport rep = error_sweep(p.spec, p.ray, dac, p.grid, p.n_list, p.sweep, p.quad);
    emit_report(rep, p.out_path, p.out_format);
    for (const auto &v : rep.verdicts)
        std::cout << (v.pass ? "pass " : "FAIL ") << v.name
                  << (v.note.empty() ? "" : "  (" + v.note + ")") << "\n";
    std::cout << "report written to " << p.out_path << "\n";
    return rep.pass() ? 0 : 5;
}

int run_canard_value(double tol, double x_far) {
    ShootResult r = canard_value_shoot(tol, x_far);
    int digits = std::max(2, std::min(12, (int)std::ceil(-std::log10(tol))));
    std::printf("c0 = %.*f  (bracket width %.3g, %zu trials)\n", digits, r.c_value, tol,
                r.classifications.size());
    return 0;
}

int run_canard_moments(const std::string &problem_path, int count) {
    ProblemFile p = ProblemFile::load(problem_path);
    if (p.spec.kind != EquationKind::QuasiLinear &&
        p.spec.kind != EquationKind::ControlledLinear &&
        p.spec.kind != EquationKind::LinearModel)
        throw schema_error("canard-moments: needs a linear-model, controlled-linear or "
                           "quasi-linear problem");
    TriJet<double> P;
    if (p.spec.kind == EquationKind::QuasiLinear) {
        P = p.spec.P->taylor3(std::max(count + 2, 4));
    } else {
        // eps y' = p x^{p-1} y + eps g(x): P(x, y, eps) = g(x)
        auto g = p.spec.g->taylor(count + 2);
        P.resize(g.size());
        for (size_t j = 0; j < g.size(); ++j)
            P[j] = {{g[j]}};
    }
    auto I = canard_moments<double>(P, p.spec.p, count, p.quad);
    bool all_zero = true;
    for (size_t n = 0; n < I.size(); ++n) {
        std::printf("I_%zu = %.12e\n", n, I[n]);
        all_zero = all_zero && std::abs(I[n]) < 1e-9;
    }
    std::cout << (all_zero ? "all moments vanish: formal canard condition holds\n"
                           : "nonzero moment found: no canard at this order\n");
    return 0;
}

int run_resonance(const std::string &alpha, const std::string &beta, int p) {
    ResonanceResult r =
        resonance_check(Rational::from_string(alpha), Rational::from_string(beta), p);
    std::cout << (r.resonant ? "resonant" : "non-resonant") << ", D = " << r.D.to_string();
    if (r.resonant) {
        std::cout << ", Z0 degree " << (r.Z0.size() - 1) << ", Z0 =";
        for (size_t k = r.Z0.size(); k-- > 0;)
            if (!r.Z0[k].is_zero())
                std::cout << " (" << r.Z0[k].to_string() << ")X^" << k;
    } else if (r.witness) {
        std::cout << ", witness index " << *r.witness;
    }
    std::cout << "\n" << r.detail << "\n";
    return 0;
}

int run_gevrey_fit(const std::string &problem_path, const std::string &norms_path,
                   double p_hint) {
    std::vector<double> norms;
    if (!norms_path.empty()) {
        norms = read_numbers(norms_path);
    } else {
        ProblemFile p = ProblemFile::load(problem_path);
        CombinedSeries<double> dac = build_dac(p);
        for (int n = 0; n < dac.eta_order(); ++n)
            norms.push_back(level_norm(dac, n, p.quad));
    }
    GevreyEstimate est =
        gevrey_fit(norms, p_hint > 0 ? std::optional<double>(p_hint) : std::nullopt);
    std::printf("fitted p = %.6g (order 1/p = %.6g), C = %.6g, L1 = %.6g, residual = %.3g\n",
                est.p, 1.0 / est.p, est.C, est.L1, est.residual);
    return 0;
}

int run_borel_sum(const std::string &coeffs_path, int p, double eta, double radius) {
    std::vector<double> a = read_numbers(coeffs_path);
    BorelSumConfig cfg;
    cfg.truncation_radius = radius;
    bool warn = false;
    double v = borel_laplace(a, p, cfg, eta, &warn);
    if (warn)
        std::cerr << "warning: coefficients do not look Gevrey of order 1/" << p << "\n";
    std::printf("borel-laplace sum = %.12g\n", v);
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"dacx: combined asymptotic expansions for singularly perturbed "
                 "turning-point problems"};
    app.footer("Exit codes: 0 success, 1 usage error, 2 schema/config error, "
               "3 domain error, 4 numeric error, 5 validation verdict failed.");
    unsigned long seed = 0;
    app.add_option("--seed", seed, "Seed for randomized property harnesses (other commands "
                                   "are deterministic)");
    app.require_subcommand(1);

    std::string problem, out_path, expansion_path, norms_path, alpha = "1", beta = "0",
                                                               coeffs_path;
    double eta = 0.1, tol = 1e-8, x_far = 10.0, p_hint = 0, radius = 0;
    int n_terms = 0, p_param = 2, count = 3;
    std::vector<double> at;

    auto *cmd_expand = app.add_subcommand("expand", "Build the combined expansion and dump "
                                                    "its coefficients as JSON");
    cmd_expand->add_option("problem", problem)->required();
    cmd_expand->add_option("-o,--out", out_path, "Output path (default stdout)");

    auto *cmd_eval = app.add_subcommand("eval", "Evaluate partial sums on the grid");
    cmd_eval->add_option("problem", problem)->required();
    cmd_eval->add_option("--eta", eta)->required();
    cmd_eval->add_option("--n", n_terms, "Partial-sum order (default: all terms)");
    cmd_eval->add_option("--expansion", expansion_path, "Re-ingest a dumped expansion");
    cmd_eval->add_option("--at", at, "Evaluate at explicit x values instead of the grid");

    auto *cmd_validate =
        app.add_subcommand("validate", "Run the error sweep and emit the report");
    cmd_validate->add_option("problem", problem)->required();

    auto *cmd_canard = app.add_subcommand("canard-value", "Shoot for the reduced inner "
                                                          "canard value");
    cmd_canard->add_option("--tol", tol, "Bracket tolerance (default 1e-8)");
    cmd_canard->add_option("--x-far", x_far, "Asymptotic matching point (default 10)");

    auto *cmd_moments = app.add_subcommand("canard-moments", "Compute the canard moment "
                                                             "integrals I_n");
    cmd_moments->add_option("problem", problem)->required();
    cmd_moments->add_option("--count", count, "Number of moments (default 3)");

    auto *cmd_res = app.add_subcommand("resonance", "Check the resonance condition for "
                                                    "(alpha, beta, p)");
    cmd_res->add_option("--alpha", alpha)->required();
    cmd_res->add_option("--beta", beta)->required();
    cmd_res->add_option("--p", p_param)->required();

    auto *cmd_fit = app.add_subcommand("gevrey-fit", "Fit Gevrey order and type constants");
    cmd_fit->add_option("problem", problem, "Problem file (fits the expansion's norms)");
    cmd_fit->add_option("--norms", norms_path, "File of norms, one per line");
    cmd_fit->add_option("--p-hint", p_hint, "Fix p instead of fitting it");

    auto *cmd_borel = app.add_subcommand("borel-sum", "Truncated Borel-Laplace value of a "
                                                      "coefficient file");
    cmd_borel->add_option("--coeffs", coeffs_path)->required();
    cmd_borel->add_option("--p", p_param)->required();
    cmd_borel->add_option("--eta", eta)->required();
    cmd_borel->add_option("--radius", radius, "Laplace truncation radius (default: auto)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_expand->parsed())
            return run_expand(problem, out_path);
        if (cmd_eval->parsed())
            return run_eval(problem, expansion_path, eta, n_terms, at);
        if (cmd_validate->parsed())
            return run_validate(problem);
        if (cmd_canard->parsed())
            return run_canard_value(tol, x_far);
        if (cmd_moments->parsed())
            return run_canard_moments(problem, count);
        if (cmd_res->parsed())
            return run_resonance(alpha, beta, p_param);
        if (cmd_fit->parsed()) {
            if (problem.empty() && norms_path.empty())
                throw schema_error("gevrey-fit: provide a problem file or --norms");
            return run_gevrey_fit(problem, norms_path, p_hint);
        }
        if (cmd_borel->parsed())
            return run_borel_sum(coeffs_path, p_param, eta, radius);
    } catch (const dacx::error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return (int)e.code();
    } catch (const std::exception &e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
    return 1;
}
