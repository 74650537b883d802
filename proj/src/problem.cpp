#include "dacx/problem.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace dacx {

namespace {

void reject_unknown(const nlohmann::json &j, const std::set<std::string> &allowed,
                    const std::string &where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw schema_error("problem file: unknown key '" + it.key() + "' in " + where);
}

std::string polynomial_source(const std::vector<double> &coeffs) {
    std::string src = "0";
    char buf[48];
    for (size_t i = 0; i < coeffs.size(); ++i) {
        if (coeffs[i] == 0)
            continue;
        std::snprintf(buf, sizeof buf, " + (%.17g)", coeffs[i]);
        src += buf;
        if (i >= 1)
            src += "*x";
        if (i >= 2) {
            std::snprintf(buf, sizeof buf, "^%zu", i);
            src += buf;
        }
    }
    return src;
}

ParsedFunction load_function(const nlohmann::json &j, const std::string &name,
                             bool allow_y_eps) {
    reject_unknown(j, {"expr", "taylor"}, "functions." + name);
    // either an expression, a raw Taylor polynomial, or both (cross-checked)
    if (!j.contains("expr")) {
        if (!j.contains("taylor"))
            throw schema_error("problem file: functions." + name +
                               " needs 'expr' and/or 'taylor'");
        auto coeffs = j.at("taylor").get<std::vector<double>>();
        return ParsedFunction::parse(polynomial_source(coeffs), allow_y_eps);
    }
    ParsedFunction f = ParsedFunction::parse(j.at("expr").get<std::string>(), allow_y_eps);
    if (j.contains("taylor")) {
        auto given = j.at("taylor").get<std::vector<double>>();
        auto derived = f.taylor((int)given.size());
        for (size_t i = 0; i < given.size(); ++i)
            if (std::abs(given[i] - derived[i]) > 1e-9 * (1 + std::abs(derived[i])))
                throw schema_error("problem file: functions." + name +
                                   ".taylor disagrees with the expression at index " +
                                   std::to_string(i));
    }
    return f;
}

} // namespace

ProblemFile ProblemFile::from_json(const nlohmann::json &j) {
    reject_unknown(j, {"schema", "kind", "p", "ray", "functions", "c_series", "c", "alpha",
                       "beta", "orders", "grid", "eta_list", "n_list", "tolerances", "output"},
                   "top level");
    if (j.value("schema", "") != "dacx-problem/1")
        throw schema_error("problem file: missing or unsupported schema tag "
                           "(expected dacx-problem/1)");
    ProblemFile p;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "linear-model")
        p.spec.kind = EquationKind::LinearModel;
    else if (kind == "initial-layer")
        p.spec.kind = EquationKind::LinearRepulsiveAttractive;
    else if (kind == "controlled-linear")
        p.spec.kind = EquationKind::ControlledLinear;
    else if (kind == "quasi-linear")
        p.spec.kind = EquationKind::QuasiLinear;
    else if (kind == "union-jack-inner")
        p.spec.kind = EquationKind::UnionJackInner;
    else if (kind == "resonance")
        p.spec.kind = EquationKind::ResonancePair;
    else
        throw schema_error("problem file: unknown kind '" + kind + "'");

    p.spec.p = j.value("p", 2);
    p.ray = j.value("ray", -1);
    if (p.ray != -1 && p.ray != 1)
        throw schema_error("problem file: ray must be -1 or 1");

    if (j.contains("functions")) {
        const auto &fns = j.at("functions");
        reject_unknown(fns, {"g", "P"}, "functions");
        if (fns.contains("g"))
            p.spec.g = load_function(fns.at("g"), "g", false);
        if (fns.contains("P"))
            p.spec.P = load_function(fns.at("P"), "P", true);
    }
    if (j.contains("c_series"))
        p.spec.c_series = j.at("c_series").get<std::vector<double>>();
    p.spec.c = j.value("c", 0.0);
    p.spec.alpha = j.value("alpha", 1.0);
    p.spec.beta = j.value("beta", 0.0);

    if (j.contains("orders")) {
        const auto &o = j.at("orders");
        reject_unknown(o, {"N", "M"}, "orders");
        p.N = o.value("N", 4);
        p.M = o.value("M", 12);
    }
    if (p.N < 1 || p.M < 1)
        throw schema_error("problem file: orders.N and orders.M must be positive");

    if (j.contains("grid")) {
        const auto &g = j.at("grid");
        reject_unknown(g, {"x_lo", "x_hi", "K", "outer_samples", "include_repulsive"}, "grid");
        p.grid.x_lo = g.value("x_lo", -1.0);
        p.grid.x_hi = g.value("x_hi", 0.0);
        p.grid.K = g.value("K", 2.0);
        p.grid.outer_samples = g.value("outer_samples", 41);
        p.grid.include_repulsive = g.value("include_repulsive", false);
        if (p.grid.K <= 0)
            throw schema_error("problem file: grid.K must be positive");
    }
    if (j.contains("eta_list")) {
        p.grid.eta_list = j.at("eta_list").get<std::vector<double>>();
        for (size_t i = 0; i < p.grid.eta_list.size(); ++i) {
            if (p.grid.eta_list[i] <= 0)
                throw schema_error("problem file: eta values must be positive");
            if (i > 0 && p.grid.eta_list[i] >= p.grid.eta_list[i - 1])
                throw schema_error("problem file: eta_list must be strictly decreasing");
        }
    }
    if (j.contains("n_list"))
        p.n_list = j.at("n_list").get<std::vector<int>>();
    else
        for (int n = 1; n <= p.N; ++n)
            p.n_list.push_back(n);

    if (j.contains("tolerances")) {
        const auto &t = j.at("tolerances");
        reject_unknown(t, {"slope_tol", "quad_tol", "shoot_tol", "noise_floor",
                           "drop_largest_eta"},
                       "tolerances");
        p.sweep.slope_tol = t.value("slope_tol", 0.3);
        p.sweep.noise_floor = t.value("noise_floor", 1e-9);
        p.sweep.drop_largest_eta = t.value("drop_largest_eta", false);
        p.quad.abs_tol = t.value("quad_tol", 1e-12);
        p.shoot_tol = t.value("shoot_tol", 1e-8);
    }
    if (j.contains("output")) {
        const auto &o = j.at("output");
        reject_unknown(o, {"path", "format"}, "output");
        p.out_path = o.value("path", "report.csv");
        std::string fmt = o.value("format", "csv");
        if (fmt == "csv")
            p.out_format = ReportFormat::Csv;
        else if (fmt == "json")
            p.out_format = ReportFormat::Json;
        else
            throw schema_error("problem file: output.format must be csv or json");
    }
    p.spec.validate();
    return p;
}

ProblemFile ProblemFile::load(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw schema_error("cannot open problem file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception &e) {
        throw schema_error("problem file '" + path + "' is not valid JSON: " + e.what());
    }
    return from_json(j);
}

} // namespace dacx
