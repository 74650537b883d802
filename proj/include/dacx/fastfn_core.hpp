#pragma once

#include <functional>
#include <vector>

#include "dacx/quad.hpp"

namespace dacx {

// Scalar kernels behind the fast-function evaluators. All work on the "-" ray;
// "+" ray calls are reflected before reaching these.

// Formal tail of U' = p X^{p-1} U + X^{j-1} in double precision, slots 1..M.
std::vector<double> u_tail_double(int p, int j, int M);

// Formal tail of D' = -p X^{p-1} D + 1 (kernel-reversed integral from 0).
std::vector<double> dawson_tail_double(int p, int M);

// Smallest |X| at which optimally truncated tail summation meets abs_tol,
// capped at 12. Used to pick quadrature vs tail summation.
double tail_switch_point(const std::vector<double> &tail, double abs_tol);

// Optimal-truncation partial sum of a tail at X: stops at the smallest term,
// reports that term's magnitude as the error bound.
double tail_sum_optimal(const std::vector<double> &tail, double X, double &err_bound);

// U_j^{ray}(X) = e^{X^p} int_{ray inf}^X e^{-T^p} T^{j-1} dT, any real X below
// the overflow regime. For odd p only the "+" ray converges.
double u_eval_core(int p, int j, int ray, double X, const QuadConfig &cfg);

// D_p(X) = e^{-X^p} int_0^X e^{T^p} dT (Dawson-type, attracting kernel).
double dawson_eval(int p, double X, const QuadConfig &cfg);

// (J^{ray} v)(X) = e^{X^p} int_{ray inf}^X e^{-T^p} v(T) dT for v of
// polynomial growth (growth_deg bounds it near the ray).
double japply_eval_core(int p, int ray, const std::function<double(double)> &v,
                        int growth_deg, double X, const QuadConfig &cfg);

} // namespace dacx
