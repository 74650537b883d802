#pragma once

#include <optional>
#include <vector>

#include "dacx/combined.hpp"
#include "dacx/fastfn.hpp"

namespace dacx {

// Fitted Gevrey order 1/p and type constants for a coefficient-norm sequence
// ||a_n|| <= C L1^n Gamma(n/p + 1); L2 enters only through tail families.
struct GevreyEstimate {
    double p = 1;  // fitted order is 1/p
    double C = 1;
    double L1 = 1;
    double L2 = 1;
    double residual = 0; // max |log norm - log model| over the fitted samples
};

// Fits (p, C, L1) over a discrete p-grid {1..6} with golden-section
// refinement, or at the given p_hint only. Needs >= 6 nonzero entries.
GevreyEstimate gevrey_fit(const std::vector<double> &norms,
                          std::optional<double> p_hint = std::nullopt);

struct TailCheckReport {
    bool pass = true;
    double worst_ratio = 0; // max over (n, M, X) of |remainder| / bound
    int worst_n = -1, worst_M = -1;
    double worst_X = 0;
};

// Verifies the two-parameter bound family
//   |X|^M |g_n(X) - sum_{m<M} g_nm X^{-m}| <= C L1^n L2^M Gamma((M+n)/p + 1)
// over all levels, truncation orders up to the stored tails, and grid points.
TailCheckReport gevrey_tail_check(const std::vector<FastCoefficient<double>> &fams, double C,
                                  double L1, double L2, int p, const std::vector<double> &grid,
                                  const QuadConfig &cfg = QuadConfig());

struct TruncationPlan {
    int n_star = 0;             // summation order: stop before this index
    double remainder_bound = 0; // envelope bound C_env L1^N Gamma(N/p+1) eta^N at N = n_star
    double exponent_A = 0;      // the bound behaves like exp(-A/eta^p), A = L1^{-p}
};

TruncationPlan optimal_truncate(const GevreyEstimate &est, int available_order, double eta);

struct BorelSumConfig {
    double direction = 0;        // real summation only in v1
    double truncation_radius = 0; // 0 = choose automatically below the radius estimate
    double quad_tol = 1e-12;
};

// Truncated Laplace transform of the formal Borel transform
// a_check(t) = sum a_n t^n / Gamma(n/p+1), evaluated at eta.
double borel_laplace(const std::vector<double> &coeffs, int p, const BorelSumConfig &cfg,
                     double eta, bool *gevrey_warning = nullptr);

// Constructive Borel-Ritt for fast parts (truncated-Laplace synthesis): the
// returned functions have exactly the prescribed asymptotic coefficients.
// rows[n][m-1] is g_{nm}; the Gevrey growth bound with the supplied constants
// is checked first.
std::vector<FastExpr<double>> synth_tails(const std::vector<std::vector<double>> &rows, int p,
                                          double C, double L1, double L2);

} // namespace dacx
