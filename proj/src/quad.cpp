#include "dacx/quad.hpp"

#include <cmath>
#include <cstdlib>

#include "dacx/errors.hpp"

namespace dacx {

namespace {

// 15-point Kronrod nodes/weights on [-1,1] and the embedded 7-point Gauss
// weights (QUADPACK dqk15 constants).
const double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
const double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GKResult {
    double value;
    double error;
    double resasc; // scale of the mean deviation, used as a roundoff floor
};

GKResult gk15(const std::function<double(double)> &f, double a, double b) {
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fv[15];
    double fc = f(c);
    fv[14] = fc;
    double resg = fc * wg[3];
    double resk = fc * wgk[7];
    for (int j = 0; j < 7; ++j) {
        double x = h * xgk[j];
        double f1 = f(c - x), f2 = f(c + x);
        fv[j] = f1;
        fv[7 + j] = f2;
        resk += wgk[j] * (f1 + f2);
        if (j % 2 == 1)
            resg += wg[j / 2] * (f1 + f2);
    }
    double value = resk * h;
    double err = std::abs((resk - resg) * h);
    // QUADPACK dqk15 error sharpening based on the mean-deviation sum.
    double reskh = resk * 0.5;
    double resasc = wgk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += wgk[j] * (std::abs(fv[j] - reskh) + std::abs(fv[7 + j] - reskh));
    resasc *= std::abs(h);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    return {value, err, resasc};
}

double adapt(const std::function<double(double)> &f, double a, double b, double tol,
             int depth, int max_depth, double &err_acc) {
    GKResult r = gk15(f, a, b);
    // Subdividing below the roundoff floor of the panel cannot help.
    double floor_ = 100.0 * 2.3e-16 * r.resasc + 1e-300;
    if (r.error <= std::max(tol, floor_) || depth >= max_depth) {
        err_acc += r.error;
        return r.value;
    }
    double m = 0.5 * (a + b);
    return adapt(f, a, m, 0.5 * tol, depth + 1, max_depth, err_acc) +
           adapt(f, m, b, 0.5 * tol, depth + 1, max_depth, err_acc);
}

} // namespace

double integrate_gk_estimate(const std::function<double(double)> &f, double a, double b,
                             double abs_tol, double &err_estimate, int max_depth) {
    err_estimate = 0;
    if (a == b)
        return 0;
    return adapt(f, a, b, abs_tol, 0, max_depth, err_estimate);
}

double integrate_gk(const std::function<double(double)> &f, double a, double b,
                    double abs_tol, int max_depth) {
    double err = 0;
    double v = integrate_gk_estimate(f, a, b, abs_tol, err, max_depth);
    if (!(err <= 50 * abs_tol + 1e-15 * std::abs(v)))
        throw numeric_error("quadrature did not reach the requested tolerance");
    if (std::isnan(v) || std::isinf(v))
        throw numeric_error("quadrature produced a non-finite value");
    return v;
}

} // namespace dacx
