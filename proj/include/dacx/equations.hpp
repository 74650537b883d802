#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dacx/errors.hpp"
#include "dacx/parser.hpp"

namespace dacx {

enum class EquationKind {
    LinearModel,              // eps y' = p x^{p-1} y + eps g(x), bounded on a half-line
    LinearRepulsiveAttractive, // eps y' = -2x y + eps g(x), y(0) = c(eps)
    ControlledLinear,         // eps y' = p x^{p-1} y + eps g(x) + eps alpha
    QuasiLinear,              // eps y' = p x^{p-1} y + eps P(x, y, eps)
    UnionJackInner,           // Y' = Y(Y-X)(Y+X) + c
    ResonancePair,            // eps z'' - f z' + g z = 0 with (alpha, beta, p) data
};

struct EquationSpec {
    EquationKind kind = EquationKind::LinearModel;
    int p = 2;
    std::optional<ParsedFunction> g;
    std::optional<ParsedFunction> P; // P(x, y, eps)
    std::vector<double> c_series;    // initial-layer c(eps) ~ sum c_n eta^n
    double c = 0;                    // Union-Jack control value
    double alpha = 1, beta = 0;      // resonance pair

    void validate() const {
        switch (kind) {
        case EquationKind::LinearModel:
        case EquationKind::ControlledLinear:
            if (!g)
                throw schema_error("equation requires a function g");
            if (p < 2 || p % 2 != 0)
                throw schema_error("this equation family requires even p >= 2");
            g->check_consistency();
            break;
        case EquationKind::LinearRepulsiveAttractive:
            if (!g)
                throw schema_error("equation requires a function g");
            g->check_consistency();
            break;
        case EquationKind::QuasiLinear:
            if (!P)
                throw schema_error("quasi-linear equation requires P(x, y, eps)");
            if (p < 2)
                throw schema_error("quasi-linear turning point requires p >= 2");
            break;
        case EquationKind::UnionJackInner:
            break;
        case EquationKind::ResonancePair:
            if (p < 2 || p % 2 != 0)
                throw schema_error("resonance requires even p >= 2");
            if (alpha == 0)
                throw schema_error("resonance requires alpha != 0");
            break;
        }
    }
};

} // namespace dacx
