#pragma once

#include <memory>
#include <string>
#include <vector>

namespace dacx {

// Scalar-function expressions over the grammar:
//   literals, x (and y, eps where allowed), + - * / ^ (integer powers),
//   unary -, exp sin cos log. Precedence ^ > unary- > * / > + -.
class ParsedFunction {
  public:
    static ParsedFunction parse(const std::string &src, bool allow_y_eps = false);

    double eval(double x) const;
    double eval3(double x, double y, double eps) const;

    // Taylor coefficients at x = 0 (univariate expressions only).
    std::vector<double> taylor(int order) const;
    // Trivariate jet at (0,0,0): coeffs[j][k][l] multiplies x^j y^k eps^l.
    std::vector<std::vector<std::vector<double>>> taylor3(int order) const;

    std::string pretty() const;
    bool uses_y() const;
    bool uses_eps() const;

    // Finite-difference spot check of the Taylor data against the evaluator.
    void check_consistency(double tol = 1e-6) const;

    struct Node;

  private:
    std::shared_ptr<const Node> root_;
};

} // namespace dacx
