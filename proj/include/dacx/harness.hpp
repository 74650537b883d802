#pragma once

#include <string>
#include <vector>

#include "dacx/combined.hpp"
#include "dacx/equations.hpp"

namespace dacx {

// Two-scale evaluation grid: outer points uniform in x, inner points uniform
// in X = x/eta with |X| <= K. The repulsive side (x > 0 for the half-line
// families) is excluded unless explicitly requested. Fast-function values at
// the window edge grow like e^{K^p}, which inflates the order-N remainder
// constants; K = 1 keeps them O(1) for the swept eta ranges.
struct GridSpec {
    double x_lo = -1.0;
    double x_hi = 0.0;
    double K = 1.0;
    int outer_samples = 41;
    std::vector<double> eta_list;
    bool include_repulsive = false;
};

std::vector<double> build_grid(const GridSpec &grid, double eta, bool half_line_kind);

// Closed-form/quadrature or stiff-integration reference value of the chosen
// equation family at (x, eps). `ray` on spec selects the bounded side.
double reference_solution(const EquationSpec &spec, int ray, double eps, double x,
                          const QuadConfig &cfg = QuadConfig());

struct SweepRow {
    double eta = 0;
    int n_terms = 0;
    double sup_error = 0;
    double wall_ms = 0;
};
struct OrderFit {
    int n_terms = 0;
    double slope = 0;
    double slope_stderr = 0;
};
struct Verdict {
    std::string name;
    bool pass = false;
    std::string note;
};

struct ValidationReport {
    std::vector<SweepRow> rows;
    std::vector<OrderFit> fits;
    std::vector<Verdict> verdicts;
    bool pass() const {
        for (const auto &v : verdicts)
            if (!v.pass)
                return false;
        return true;
    }
};

struct SweepOptions {
    double slope_tol = 0.3;
    bool drop_largest_eta = false;
    // errors below this floor count as exact; the slope verdict then passes
    double noise_floor = 1e-9;
};

ValidationReport error_sweep(const EquationSpec &spec, int ray,
                             const CombinedSeries<double> &dac, const GridSpec &grid,
                             const std::vector<int> &n_list,
                             const SweepOptions &opts = SweepOptions(),
                             const QuadConfig &cfg = QuadConfig());

enum class ReportFormat { Csv, Json };
void emit_report(const ValidationReport &report, const std::string &path, ReportFormat format);

// Worker-pool map over [0, n); honors the DACX_THREADS cap.
void parallel_for(int n, const std::function<void(int)> &body);

} // namespace dacx
