#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "dacx/equations.hpp"
#include "dacx/harness.hpp"

namespace dacx {

// Problem document (versioned JSON, unknown keys rejected).
struct ProblemFile {
    EquationSpec spec;
    int ray = -1;
    int N = 4;
    int M = 12;
    std::vector<int> n_list; // partial-sum orders for validate; default 1..N
    GridSpec grid;
    SweepOptions sweep;
    QuadConfig quad;
    double shoot_tol = 1e-8;
    std::string out_path = "report.csv";
    ReportFormat out_format = ReportFormat::Csv;

    static ProblemFile load(const std::string &path);
    static ProblemFile from_json(const nlohmann::json &j);
};

// ---- combined-series serialization (lossless per scalar mode) ----

namespace detail {

template <class T> nlohmann::json scalar_to_json(const T &v);
template <> inline nlohmann::json scalar_to_json<double>(const double &v) { return v; }
template <> inline nlohmann::json scalar_to_json<Rational>(const Rational &v) {
    return v.to_string();
}

template <class T> T scalar_from_json(const nlohmann::json &j);
template <> inline double scalar_from_json<double>(const nlohmann::json &j) {
    return j.get<double>();
}
template <> inline Rational scalar_from_json<Rational>(const nlohmann::json &j) {
    return Rational::from_string(j.get<std::string>());
}

template <class T> nlohmann::json expr_to_json(const FastExpr<T> &e) {
    using nlohmann::json;
    const auto &n = e.node();
    switch (n.kind) {
    case FastKind::Zero:
        return json{{"kind", "zero"}};
    case FastKind::Monomial:
        return json{{"kind", "monomial"}, {"k", n.a}};
    case FastKind::ExpPow:
        return json{{"kind", "exp_pow"}, {"s", n.a}, {"p", n.b}};
    case FastKind::SpecialU:
        return json{{"kind", "special_u"}, {"p", n.a}, {"j", n.b}, {"ray", n.c}};
    case FastKind::Dawson:
        return json{{"kind", "dawson"}, {"p", n.a}};
    case FastKind::JApply:
        return json{{"kind", "japply"}, {"ray", n.a}, {"p", n.b},
                    {"child", expr_to_json(n.kids[0])}};
    case FastKind::Sum: {
        json kids = json::array();
        for (const auto &k : n.kids)
            kids.push_back(expr_to_json(k));
        return json{{"kind", "sum"}, {"children", kids}};
    }
    case FastKind::Scale:
        return json{{"kind", "scale"}, {"c", scalar_to_json<T>(n.scalar)},
                    {"child", expr_to_json(n.kids[0])}};
    case FastKind::Product: {
        json kids = json::array();
        for (const auto &k : n.kids)
            kids.push_back(expr_to_json(k));
        return json{{"kind", "product"}, {"children", kids}};
    }
    case FastKind::Derivative:
        return json{{"kind", "derivative"}, {"child", expr_to_json(n.kids[0])}};
    case FastKind::TShift:
        return json{{"kind", "tshift"}, {"child", expr_to_json(n.kids[0])}};
    case FastKind::BorelKernel: {
        json tail = json::array();
        for (const auto &v : n.prescribed_tail)
            tail.push_back(scalar_to_json<T>(v));
        return json{{"kind", "borel"},    {"p", n.a},       {"shift", n.b},
                    {"t_coeffs", n.t_coeffs}, {"t_m0", n.t_m0}, {"t_max", n.t_max},
                    {"tail", tail}};
    }
    }
    return json{{"kind", "zero"}};
}

template <class T> FastExpr<T> expr_from_json(const nlohmann::json &j) {
    using E = FastExpr<T>;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero")
        return E::zero();
    if (kind == "monomial")
        return E::monomial(j.at("k").get<int>());
    if (kind == "exp_pow")
        return E::exp_pow(j.at("s").get<int>(), j.at("p").get<int>());
    if (kind == "special_u")
        return E::special_u(j.at("p").get<int>(), j.at("j").get<int>(), j.at("ray").get<int>());
    if (kind == "dawson")
        return E::dawson(j.at("p").get<int>());
    if (kind == "japply")
        return E::j_node(j.at("ray").get<int>(), j.at("p").get<int>(),
                         expr_from_json<T>(j.at("child")));
    if (kind == "sum" || kind == "product") {
        std::vector<E> kids;
        for (const auto &k : j.at("children"))
            kids.push_back(expr_from_json<T>(k));
        return kind == "sum" ? E::sum(std::move(kids)) : E::product(std::move(kids));
    }
    if (kind == "scale")
        return E::scale(scalar_from_json<T>(j.at("c")), expr_from_json<T>(j.at("child")));
    if (kind == "derivative")
        return E::derivative(expr_from_json<T>(j.at("child")));
    if (kind == "tshift")
        return E::tshift(expr_from_json<T>(j.at("child")));
    if (kind == "borel") {
        std::vector<T> tail;
        for (const auto &v : j.at("tail"))
            tail.push_back(scalar_from_json<T>(v));
        return E::borel_kernel(j.at("p").get<int>(), j.at("shift").get<int>(),
                               j.at("t_coeffs").get<std::vector<double>>(),
                               j.at("t_m0").get<int>(), j.at("t_max").get<double>(),
                               std::move(tail));
    }
    throw schema_error("expansion: unknown expression node kind '" + kind + "'");
}

} // namespace detail

template <class T> nlohmann::json expansion_to_json(const CombinedSeries<T> &y) {
    using nlohmann::json;
    json j;
    j["schema"] = "dacx-expansion/1";
    j["mode"] = scalar_traits<T>::exact ? "rational" : "double";
    j["p"] = y.p();
    j["eta_order"] = y.eta_order();
    j["slow_order"] = y.slow_order();
    j["fast_order"] = y.fast_order();
    j["trunc_loss"] = y.trunc_loss();
    j["terms"] = json::array();
    for (int n = 0; n < y.eta_order(); ++n) {
        json slow = json::array(), tail = json::array(), poly = json::array();
        for (const auto &v : y.slow(n).c)
            slow.push_back(detail::scalar_to_json<T>(v));
        for (const auto &v : y.fast(n).tail.c)
            tail.push_back(detail::scalar_to_json<T>(v));
        for (const auto &v : y.fast(n).poly)
            poly.push_back(detail::scalar_to_json<T>(v));
        json term{{"slow", slow}, {"tail", tail}, {"poly", poly}};
        term["expr"] = y.fast(n).expr ? detail::expr_to_json(*y.fast(n).expr) : json(nullptr);
        j["terms"].push_back(term);
    }
    return j;
}

template <class T> CombinedSeries<T> expansion_from_json(const nlohmann::json &j) {
    if (j.value("schema", "") != "dacx-expansion/1")
        throw schema_error("expansion: missing or unsupported schema tag");
    std::string mode = j.at("mode").get<std::string>();
    if ((mode == "rational") != scalar_traits<T>::exact)
        throw schema_error("expansion: scalar mode mismatch (" + mode + ")");
    CombinedSeries<T> y(j.at("p").get<int>(), j.at("eta_order").get<int>(),
                        j.at("slow_order").get<int>(), j.at("fast_order").get<int>());
    y.set_trunc_loss(j.value("trunc_loss", 0));
    const auto &terms = j.at("terms");
    for (int n = 0; n < y.eta_order(); ++n) {
        const auto &t = terms.at((size_t)n);
        const auto &slow = t.at("slow");
        for (int m = 0; m < y.slow_order() && m < (int)slow.size(); ++m)
            y.slow(n).c[(size_t)m] = detail::scalar_from_json<T>(slow.at((size_t)m));
        const auto &tail = t.at("tail");
        for (int m = 0; m < y.fast_order() && m < (int)tail.size(); ++m)
            y.fast(n).tail.c[(size_t)m] = detail::scalar_from_json<T>(tail.at((size_t)m));
        for (const auto &v : t.at("poly"))
            y.fast(n).poly.push_back(detail::scalar_from_json<T>(v));
        if (!t.at("expr").is_null())
            y.fast(n).expr = detail::expr_from_json<T>(t.at("expr"));
    }
    return y;
}

} // namespace dacx
