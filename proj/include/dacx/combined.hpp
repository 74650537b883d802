#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dacx/fastfn.hpp"
#include "dacx/series.hpp"

namespace dacx {

// Fast part of one eta-power: asymptotic tail, optional evaluable tree, and a
// polynomial part that only inner expansions use.
template <class T> struct FastCoefficient {
    FastTail<T> tail;
    std::optional<FastExpr<T>> expr;
    std::vector<T> poly;

    static FastCoefficient zero(int order) {
        FastCoefficient f;
        f.tail = FastTail<T>::zero(order);
        return f;
    }
    bool is_zero() const {
        if (!tail.is_zero() || !all_zero(poly))
            return false;
        return !expr || expr->is_zero();
    }
    bool formally_zero() const { return tail.is_zero() && all_zero(poly); }
};

template <class T> struct CombinedTerm {
    SlowSeries<T> slow;
    FastCoefficient<T> fast;
};

// Truncated combined formal series: sum over n < N of (a_n(x) + g_n(x/eta)) eta^n.
// Immutable by convention: operations return fresh values.
template <class T> class CombinedSeries {
  public:
    CombinedSeries() = default;
    CombinedSeries(int p, int eta_order, int slow_order, int fast_order)
        : p_(p), slow_order_(slow_order), fast_order_(fast_order) {
        if (p < 1)
            throw domain_error("CombinedSeries: root order p must be >= 1");
        terms_.resize((size_t)eta_order);
        for (auto &t : terms_) {
            t.slow = SlowSeries<T>::zero(slow_order);
            t.fast = FastCoefficient<T>::zero(fast_order);
        }
    }

    int p() const { return p_; }
    int eta_order() const { return (int)terms_.size(); }
    int slow_order() const { return slow_order_; }
    int fast_order() const { return fast_order_; }
    // Per-level linear loss from mixed products: coefficients of level n are
    // reliable to order M - trunc_loss*n.
    int trunc_loss() const { return trunc_loss_; }
    void set_trunc_loss(int l) { trunc_loss_ = l; }
    int effective_slow_order(int n) const { return std::max(0, slow_order_ - trunc_loss_ * n); }
    int effective_fast_order(int n) const { return std::max(0, fast_order_ - trunc_loss_ * n); }

    CombinedTerm<T> &term(int n) { return terms_[(size_t)n]; }
    const CombinedTerm<T> &term(int n) const { return terms_[(size_t)n]; }
    SlowSeries<T> &slow(int n) { return terms_[(size_t)n].slow; }
    const SlowSeries<T> &slow(int n) const { return terms_[(size_t)n].slow; }
    FastCoefficient<T> &fast(int n) { return terms_[(size_t)n].fast; }
    const FastCoefficient<T> &fast(int n) const { return terms_[(size_t)n].fast; }

    bool level_formally_zero(int n) const {
        return terms_[(size_t)n].slow.is_zero() && terms_[(size_t)n].fast.formally_zero();
    }

    // Partial sum of order n_terms at (x, eta); uses exprs when present, the
    // asymptotic tail partial sum otherwise.
    double eval_partial(double x, double eta, int n_terms,
                        const QuadConfig &cfg = QuadConfig()) const {
        double X = x / eta, s = 0, etap = 1;
        for (int n = 0; n < n_terms && n < eta_order(); ++n) {
            double fastv = 0;
            const auto &f = fast(n);
            if (f.expr)
                fastv = f.expr->eval(X, cfg);
            else if (!f.tail.is_zero())
                fastv = f.tail.eval_partial(X);
            for (size_t i = 0; i < f.poly.size(); ++i)
                fastv += scalar_to_double(f.poly[i]) * std::pow(X, (double)i);
            s += (slow(n).eval(x) + fastv) * etap;
            etap *= eta;
        }
        return s;
    }

  private:
    int p_ = 1;
    int slow_order_ = 0;
    int fast_order_ = 0;
    int trunc_loss_ = 0;
    std::vector<CombinedTerm<T>> terms_;
};

// ---- valuation and the ultrametric distance ----

// Valuation of the formal data: a level counts as zero when its Taylor slots,
// tail slots, and polynomial part all vanish within truncation. Evaluable
// trees attached to flat fast parts do not participate; the metric lives on
// the formal algebra.
template <class T> int valuation(const CombinedSeries<T> &y) {
    for (int n = 0; n < y.eta_order(); ++n)
        if (!y.level_formally_zero(n))
            return n;
    return y.eta_order();
}

template <class T> CombinedSeries<T> sub(const CombinedSeries<T> &a, const CombinedSeries<T> &b);

template <class T> double distance(const CombinedSeries<T> &a, const CombinedSeries<T> &b) {
    return std::pow(2.0, -(double)valuation(sub(a, b)));
}

// ---- linear structure ----

template <class T>
CombinedSeries<T> add_scaled(const CombinedSeries<T> &a, const T &s, const CombinedSeries<T> &b) {
    if (a.p() != b.p())
        throw schema_error("combined series have different root orders p");
    int N = std::min(a.eta_order(), b.eta_order());
    int Ms = std::min(a.slow_order(), b.slow_order());
    int Mf = std::min(a.fast_order(), b.fast_order());
    CombinedSeries<T> r(a.p(), N, Ms, Mf);
    r.set_trunc_loss(std::max(a.trunc_loss(), b.trunc_loss()));
    for (int n = 0; n < N; ++n) {
        for (int m = 0; m < Ms; ++m)
            r.slow(n).c[(size_t)m] = a.slow(n).c[(size_t)m] + s * b.slow(n).c[(size_t)m];
        for (int m = 0; m < Mf; ++m)
            r.fast(n).tail.c[(size_t)m] =
                a.fast(n).tail.c[(size_t)m] + s * b.fast(n).tail.c[(size_t)m];
        auto pa = a.fast(n).poly, pb = b.fast(n).poly;
        for (auto &v : pb)
            v = v * s;
        r.fast(n).poly = taylor_add(pa, pb);
        bool a_has = a.fast(n).expr.has_value() || a.fast(n).tail.is_zero();
        bool b_has = b.fast(n).expr.has_value() || b.fast(n).tail.is_zero();
        if (a_has && b_has) {
            FastExpr<T> ea = a.fast(n).expr ? *a.fast(n).expr : FastExpr<T>::zero();
            FastExpr<T> eb = b.fast(n).expr ? *b.fast(n).expr : FastExpr<T>::zero();
            auto e = FastExpr<T>::sum({ea, FastExpr<T>::scale(s, eb)});
            if (!e.is_zero() || r.fast(n).tail.is_zero())
                r.fast(n).expr = e;
        }
    }
    return r;
}

template <class T>
CombinedSeries<T> add(const CombinedSeries<T> &a, const CombinedSeries<T> &b) {
    return add_scaled(a, scalar_traits<T>::one(), b);
}
template <class T>
CombinedSeries<T> sub(const CombinedSeries<T> &a, const CombinedSeries<T> &b) {
    return add_scaled(a, -scalar_traits<T>::one(), b);
}
template <class T> CombinedSeries<T> scale(const T &s, const CombinedSeries<T> &a) {
    CombinedSeries<T> z(a.p(), a.eta_order(), a.slow_order(), a.fast_order());
    return add_scaled(z, s, a);
}

// Multiply by eta^k (shift levels up), truncating at the original order.
template <class T> CombinedSeries<T> shift_up(const CombinedSeries<T> &a, int k) {
    CombinedSeries<T> r(a.p(), a.eta_order(), a.slow_order(), a.fast_order());
    r.set_trunc_loss(a.trunc_loss());
    for (int n = 0; n + k < a.eta_order(); ++n)
        r.term(n + k) = a.term(n);
    return r;
}

// Divide by eta^k; the dropped low levels must be formally zero.
template <class T> CombinedSeries<T> shift_down(const CombinedSeries<T> &a, int k) {
    for (int n = 0; n < std::min(k, a.eta_order()); ++n)
        if (!a.level_formally_zero(n))
            throw domain_error("shift_down: nonzero coefficient below eta^k");
    CombinedSeries<T> r(a.p(), a.eta_order(), a.slow_order(), a.fast_order());
    r.set_trunc_loss(a.trunc_loss());
    for (int n = k; n < a.eta_order(); ++n)
        r.term(n - k) = a.term(n);
    return r;
}

namespace detail {

// Accumulate the mixed slow/fast product I(a) I(g):
//   sum_nu ( g_nu (S^nu a)(x) + a_nu (T^nu g)(x/eta) ) eta^nu,  g_0 = 0,
// into r starting at level `base`.
template <class T>
void accumulate_mixed(CombinedSeries<T> &r, const SlowSeries<T> &a, const FastCoefficient<T> &g,
                      int base) {
    if (a.is_zero() || g.formally_zero())
        return;
    int N = r.eta_order();
    int Ms = r.slow_order(), Mf = r.fast_order();
    for (int nu = 0; base + nu < N; ++nu) {
        int lvl = base + nu;
        // slow: g_nu * S^nu a (only while both truncations still have content)
        if (nu >= 1 && nu <= g.tail.order()) {
            const T &gnu = g.tail.coeff(nu);
            if (!scalar_is_zero(gnu))
                for (int m = 0; m + nu < a.order() && m < Ms; ++m)
                    r.slow(lvl).c[(size_t)m] =
                        r.slow(lvl).c[(size_t)m] + gnu * a.c[(size_t)(m + nu)];
        }
        // fast: a_nu * T^nu g
        if (nu < a.order() && !scalar_is_zero(a.c[(size_t)nu])) {
            const T &anu = a.c[(size_t)nu];
            for (int m = 1; m + nu <= g.tail.order() && m <= Mf; ++m)
                r.fast(lvl).tail.c[(size_t)m - 1] =
                    r.fast(lvl).tail.c[(size_t)m - 1] + anu * g.tail.coeff(m + nu);
            if (g.expr) {
                FastExpr<T> sh = *g.expr;
                for (int i = 0; i < nu; ++i)
                    sh = FastExpr<T>::tshift(sh);
                if (r.fast(lvl).expr)
                    r.fast(lvl).expr =
                        FastExpr<T>::sum({*r.fast(lvl).expr, FastExpr<T>::scale(anu, sh)});
            } else {
                r.fast(lvl).expr.reset(); // tail-only contribution poisons the expr
            }
        }
    }
}

template <class T>
FastTail<T> tail_mul(const FastTail<T> &a, const FastTail<T> &b, int order) {
    FastTail<T> r = FastTail<T>::zero(order);
    for (int i = 1; i <= a.order(); ++i) {
        if (scalar_is_zero(a.coeff(i)))
            continue;
        for (int j = 1; i + j <= order && j <= b.order(); ++j)
            r.c[(size_t)(i + j) - 1] = r.c[(size_t)(i + j) - 1] + a.coeff(i) * b.coeff(j);
    }
    return r;
}

} // namespace detail

// Cauchy product in eta with the mixed slow/fast shift expansion.
template <class T>
CombinedSeries<T> mul(const CombinedSeries<T> &a, const CombinedSeries<T> &b) {
    if (a.p() != b.p())
        throw schema_error("mul: combined series have different root orders p");
    int N = std::min(a.eta_order(), b.eta_order());
    for (int n = 0; n < N; ++n)
        if (!all_zero(a.fast(n).poly) || !all_zero(b.fast(n).poly))
            throw domain_error("mul: fast coefficient with a polynomial part is not in G(V)");
    int Ms = std::min(a.slow_order(), b.slow_order());
    int Mf = std::min(a.fast_order(), b.fast_order());
    CombinedSeries<T> r(a.p(), N, Ms, Mf);
    r.set_trunc_loss(std::max({a.trunc_loss(), b.trunc_loss(), 1}));
    // start with exprs present (zero); contributions may poison them
    for (int n = 0; n < N; ++n)
        r.fast(n).expr = FastExpr<T>::zero();
    for (int k = 0; k < N; ++k) {
        for (int l = 0; k + l < N; ++l) {
            int lvl = k + l;
            // slow x slow
            if (!a.slow(k).is_zero() && !b.slow(l).is_zero()) {
                auto prod = taylor_mul(a.slow(k).c, b.slow(l).c, Ms);
                for (int m = 0; m < Ms; ++m)
                    r.slow(lvl).c[(size_t)m] = r.slow(lvl).c[(size_t)m] + prod[(size_t)m];
            }
            // fast x fast
            const auto &fa = a.fast(k);
            const auto &fb = b.fast(l);
            if (!fa.formally_zero() && !fb.formally_zero()) {
                auto prod = detail::tail_mul(fa.tail, fb.tail, Mf);
                for (int m = 0; m < Mf; ++m)
                    r.fast(lvl).tail.c[(size_t)m] = r.fast(lvl).tail.c[(size_t)m] + prod.c[(size_t)m];
                if (fa.expr && fb.expr) {
                    if (r.fast(lvl).expr)
                        r.fast(lvl).expr = FastExpr<T>::sum(
                            {*r.fast(lvl).expr, FastExpr<T>::product({*fa.expr, *fb.expr})});
                } else {
                    r.fast(lvl).expr.reset();
                }
            }
            // mixed, spreading upward from lvl
            detail::accumulate_mixed(r, a.slow(k), b.fast(l), lvl);
            detail::accumulate_mixed(r, b.slow(l), a.fast(k), lvl);
        }
    }
    return r;
}

// ---- calculus ----

template <class T> CombinedSeries<T> differentiate(const CombinedSeries<T> &y) {
    const auto &f0 = y.fast(0);
    if (!(f0.formally_zero() && (!f0.expr || f0.expr->is_zero())))
        throw domain_error("differentiate: fast part of the eta^0 term must vanish");
    // The top level needs g_N, which is beyond the truncation, so the result
    // drops one level -- except when every fast part vanishes.
    bool slow_only = true;
    for (int n = 0; n < y.eta_order() && slow_only; ++n)
        slow_only = y.fast(n).is_zero();
    int N = slow_only ? y.eta_order() : std::max(0, y.eta_order() - 1);
    int Ms = std::max(0, y.slow_order() - 1);
    int Mf = y.fast_order() + 1;
    CombinedSeries<T> r(y.p(), N, Ms, Mf);
    r.set_trunc_loss(y.trunc_loss());
    for (int n = 0; n < N; ++n) {
        r.slow(n) = SlowSeries<T>(taylor_derivative(y.slow(n).c));
        r.slow(n).c.resize((size_t)Ms, scalar_traits<T>::zero());
        if (n + 1 >= y.eta_order())
            continue;
        const auto &g = y.fast(n + 1);
        // (g')_{m+1} = -m g_m
        for (int m = 1; m <= g.tail.order() && m + 1 <= Mf; ++m)
            r.fast(n).tail.c[(size_t)m] = scalar_traits<T>::from_int(-m) * g.tail.coeff(m);
        if (g.expr)
            r.fast(n).expr = FastExpr<T>::derivative(*g.expr);
        else if (!g.tail.is_zero())
            r.fast(n).expr.reset();
        else
            r.fast(n).expr = FastExpr<T>::zero();
        r.fast(n).poly = taylor_derivative(g.poly);
    }
    return r;
}

// Antiderivative of a combined series. The log payload carries the residues:
//   integral ~ sum_n residues[n] eta^{n+1} (l(x/eta,eta) - l(base/eta,eta)) + base_series
// with l(X,eta) = (1/p) log(X^p + 1) + log eta, i.e. (1/p) log(x^p + eps).
template <class T> struct LogAugmentedSeries {
    CombinedSeries<T> base_series;
    std::vector<T> residues; // residues[n] = g_{n,1} of the integrand
    T base_point = scalar_traits<T>::zero();

    bool log_free() const { return all_zero(residues); }
    // Valid representation as a plain combined series iff residue-free.
    const CombinedSeries<T> &as_plain() const {
        if (!log_free())
            throw domain_error("integral has a log term; no plain combined series form");
        return base_series;
    }

    double eval_partial(double x, double eta, int n_terms,
                        const QuadConfig &cfg = QuadConfig()) const {
        int p = base_series.p();
        double eps = std::pow(eta, (double)p);
        double b = scalar_to_double(base_point);
        double lg = (std::log(std::pow(x, (double)p) + eps) -
                     std::log(std::pow(b, (double)p) + eps)) /
                    p;
        double s = 0, etap = eta;
        for (size_t n = 0; n < residues.size() && (int)n + 1 < n_terms; ++n) {
            s += scalar_to_double(residues[n]) * etap * lg;
            etap *= eta;
        }
        s += base_series.eval_partial(x, eta, n_terms, cfg);
        // subtract the fast parts' values at the base point (slow parts vanish
        // there by construction)
        double Xb = b / eta;
        etap = 1;
        for (int n = 0; n < std::min(n_terms, base_series.eta_order()); ++n) {
            const auto &f = base_series.fast(n);
            if (f.expr)
                s -= f.expr->eval(Xb, cfg) * etap;
            else if (!f.tail.is_zero())
                s -= f.tail.eval_partial(Xb) * etap;
            etap *= eta;
        }
        return s;
    }
};

template <class T>
LogAugmentedSeries<T> integrate(const CombinedSeries<T> &y, const T &base) {
    int N = y.eta_order(), p = y.p();
    int Ms = y.slow_order() + 1;
    int Mf = std::max(0, y.fast_order() - 1);
    LogAugmentedSeries<T> out;
    out.base_point = base;
    out.residues.assign((size_t)N, scalar_traits<T>::zero());
    CombinedSeries<T> r(p, N, Ms, Mf);
    r.set_trunc_loss(y.trunc_loss());
    for (int n = 0; n < N; ++n) {
        // slow: A_n(x) = int_base^x a_n, as a Taylor polynomial with A_n(base)=0
        auto A = taylor_antiderivative(y.slow(n).c);
        SlowSeries<T> As{A};
        T at_base = As.eval_exact(base);
        A[0] = A[0] - at_base;
        A.resize((size_t)Ms, scalar_traits<T>::zero());
        r.slow(n) = SlowSeries<T>(A);
        // fast: H_{n-1} lands at level n
        const auto &g = y.fast(n);
        T res = g.tail.order() >= 1 ? g.tail.coeff(1) : scalar_traits<T>::zero();
        out.residues[(size_t)n] = res;
        if (n + 1 < N) {
            auto &H = r.fast(n + 1);
            for (int m = 2; m <= g.tail.order() && m - 1 <= Mf; ++m) {
                // l'(X) = X^{p-1}/(X^p+1) ~ sum_k (-1)^k X^{-kp-1}
                T lp = scalar_traits<T>::zero();
                if ((m - 1) % p == 0)
                    lp = ((m - 1) / p) % 2 == 0 ? scalar_traits<T>::one()
                                                : -scalar_traits<T>::one();
                T cm = g.tail.coeff(m) - res * lp;
                H.tail.c[(size_t)m - 2] = -cm / scalar_traits<T>::from_int(m - 1);
            }
            if (!H.tail.is_zero())
                H.expr.reset(); // no closed evaluable form for the tail antiderivative
        }
    }
    out.base_series = r;
    return out;
}

// ---- composition ----

// Series in (y, eta) with combined-series coefficients p_{j,k}.
template <class T> struct CompositionSeries {
    std::map<std::pair<int, int>, CombinedSeries<T>> coeffs;
    void set(int j, int k, CombinedSeries<T> c) { coeffs[{j, k}] = std::move(c); }
};

template <class T>
CombinedSeries<T> compose_left(const CompositionSeries<T> &P, const CombinedSeries<T> &y) {
    if (valuation(y) < 1)
        throw domain_error("compose_left: argument must have valuation >= 1");
    int N = y.eta_order();
    CombinedSeries<T> acc(y.p(), N, y.slow_order(), y.fast_order());
    acc.set_trunc_loss(std::max(y.trunc_loss(), 1));
    std::vector<CombinedSeries<T>> pow;
    pow.push_back(CombinedSeries<T>(y.p(), N, y.slow_order(), y.fast_order()));
    pow[0].slow(0).c[0] = scalar_traits<T>::one(); // y^0 = 1
    for (int j = 1; j < N; ++j)
        pow.push_back(mul(pow.back(), y));
    for (const auto &[jk, pjk] : P.coeffs) {
        auto [j, k] = jk;
        if (j + k >= N || j >= (int)pow.size())
            continue;
        acc = add(acc, shift_up(mul(pjk, pow[(size_t)j]), k));
    }
    return acc;
}

// f(yhat) for analytic f given by Taylor coefficients at c = a_0(0):
// f_taylor[i] = f^{(i)}(c)/i!. Handles valuation-0 series; the slow germ
// a_0 - c has positive x-valuation so the series terminates within truncation.
template <class T>
CombinedSeries<T> compose_analytic(const std::vector<T> &f_taylor, const CombinedSeries<T> &y) {
    int N = y.eta_order();
    int Ms = y.slow_order(), Mf = y.fast_order();
    T c = Ms > 0 ? y.slow(0).c[0] : scalar_traits<T>::zero();
    CombinedSeries<T> yt = y;
    if (Ms > 0)
        yt.slow(0).c[0] = yt.slow(0).c[0] - c;
    CombinedSeries<T> acc(y.p(), N, Ms, Mf);
    acc.set_trunc_loss(std::max(y.trunc_loss(), 1));
    int Jmax = N + std::max(Ms, Mf) + 1;
    CombinedSeries<T> power(y.p(), N, Ms, Mf);
    power.slow(0).c[0] = scalar_traits<T>::one();
    for (int j = 0; j < (int)f_taylor.size() && j <= Jmax; ++j) {
        if (!scalar_is_zero(f_taylor[(size_t)j]))
            acc = add_scaled(acc, f_taylor[(size_t)j], power);
        bool all_zero_now = true;
        for (int n = 0; n < N && all_zero_now; ++n)
            all_zero_now = power.level_formally_zero(n);
        if (all_zero_now)
            break;
        if (j + 1 < (int)f_taylor.size() && j + 1 <= Jmax)
            power = mul(power, yt);
    }
    return acc;
}

// ---- outer/inner extraction and matching ----

// Outer coefficients c_n(x) as Laurent data: powers x^{-n}..x^{M-1}.
template <class T> struct LaurentSeq {
    std::vector<std::vector<T>> rows; // rows[n][i] is the coefficient of x^{i-n}
    int reg_order = 0;                // regular part truncation M

    int levels() const { return (int)rows.size(); }
    T coeff(int n, int m) const { // m in [-n, reg_order)
        int idx = m + n;
        if (idx < 0 || idx >= (int)rows[(size_t)n].size())
            return scalar_traits<T>::zero();
        return rows[(size_t)n][(size_t)idx];
    }
    void set_coeff(int n, int m, const T &v) { rows[(size_t)n][(size_t)(m + n)] = v; }
};

// Inner coefficients h_n(X): polynomial of degree <= n plus a fast coefficient.
template <class T> struct InnerRow {
    std::vector<T> poly;
    FastCoefficient<T> fast;
};
template <class T> struct InnerSeq {
    std::vector<InnerRow<T>> rows;
    int levels() const { return (int)rows.size(); }
    // coefficient of X^{-m}; m <= 0 addresses the polynomial part
    T coeff(int n, int m) const {
        const auto &r = rows[(size_t)n];
        if (m <= 0) {
            int l = -m;
            return l < (int)r.poly.size() ? r.poly[(size_t)l] : scalar_traits<T>::zero();
        }
        return m <= r.fast.tail.order() ? r.fast.tail.coeff(m) : scalar_traits<T>::zero();
    }
};

template <class T> LaurentSeq<T> extract_outer(const CombinedSeries<T> &y) {
    int N = y.eta_order(), M = y.slow_order();
    LaurentSeq<T> out;
    out.reg_order = M;
    out.rows.resize((size_t)N);
    for (int n = 0; n < N; ++n) {
        out.rows[(size_t)n].assign((size_t)(n + M), scalar_traits<T>::zero());
        for (int m = 0; m < M; ++m)
            out.set_coeff(n, m, y.slow(n).c[(size_t)m]);
        // c_n polar part: g_{l,n-l} x^{l-n}, 0 <= l <= n-1
        for (int l = 0; l < n; ++l) {
            int slot = n - l;
            if (slot <= y.fast(l).tail.order())
                out.set_coeff(n, l - n, y.fast(l).tail.coeff(slot));
        }
    }
    return out;
}

template <class T> InnerSeq<T> extract_inner(const CombinedSeries<T> &y) {
    int N = y.eta_order(), M = y.slow_order();
    InnerSeq<T> in;
    in.rows.resize((size_t)N);
    for (int n = 0; n < N; ++n) {
        auto &r = in.rows[(size_t)n];
        r.poly.assign((size_t)n + 1, scalar_traits<T>::zero());
        for (int l = 0; l <= n && l < M; ++l)
            r.poly[(size_t)l] = y.slow(n - l).c[(size_t)l];
        r.fast = y.fast(n);
    }
    return in;
}

// Matching failure with the worst offending (n, m) index pair.
class match_error : public error {
  public:
    match_error(int n, int m, const std::string &what)
        : error(errc::domain, what), n_(n), m_(m) {}
    int level() const { return n_; }
    int power() const { return m_; }

  private:
    int n_, m_;
};

// Rebuild a combined series from outer/inner data, checking the overlap
// identity c_{nm} = z_{n+m,-m} first.
template <class T>
CombinedSeries<T> match_reconstruct(const LaurentSeq<T> &outer, const InnerSeq<T> &inner, int p,
                                    double tol = 1e-10) {
    int N = std::min(outer.levels(), inner.levels());
    int M = outer.reg_order;
    double worst = 0;
    int wn = -1, wm = 0;
    for (int n = 0; n < N; ++n) {
        for (int m = -n; m < M; ++m) {
            if (n + m >= N)
                continue;
            double diff = std::abs(scalar_to_double(outer.coeff(n, m)) -
                                   scalar_to_double(inner.coeff(n + m, -m)));
            if (scalar_traits<T>::exact) {
                if (!(outer.coeff(n, m) == inner.coeff(n + m, -m)) && diff >= worst) {
                    worst = std::max(diff, 1e-300);
                    wn = n;
                    wm = m;
                }
            } else if (diff > tol && diff > worst) {
                worst = diff;
                wn = n;
                wm = m;
            }
        }
    }
    if (wn >= 0)
        throw match_error(wn, wm,
                          "matching inconsistency at (n=" + std::to_string(wn) +
                              ", m=" + std::to_string(wm) + ")");
    int Mf = 0;
    for (int n = 0; n < N; ++n)
        Mf = std::max(Mf, inner.rows[(size_t)n].fast.tail.order());
    CombinedSeries<T> r(p, N, M, Mf);
    for (int n = 0; n < N; ++n) {
        for (int m = 0; m < M; ++m)
            r.slow(n).c[(size_t)m] = outer.coeff(n, m);
        const auto &f = inner.rows[(size_t)n].fast;
        for (int m = 1; m <= f.tail.order(); ++m)
            r.fast(n).tail.c[(size_t)m - 1] = f.tail.coeff(m);
        r.fast(n).expr = f.expr;
    }
    return r;
}

// ---- two-point composite expansions ----

// Composite expansion on [a, d] built from a DAC at a (local variable x-a)
// and a DAC at d (local variable d-x).
template <class T> struct TwoPointExpansion {
    double a = 0, d = 0;
    CombinedSeries<T> left;  // series in u = x-a
    CombinedSeries<T> right; // series in v = d-x

    // c_n(x) via the left formula: a_n(x) - sum_l h_{l,n-l} (d-x)^{l-n}
    double c_left(int n, double x) const {
        double s = left.slow(n).eval(x - a);
        for (int l = 0; l < n; ++l) {
            int slot = n - l;
            if (slot <= right.fast(l).tail.order())
                s -= scalar_to_double(right.fast(l).tail.coeff(slot)) *
                     std::pow(d - x, (double)(l - n));
        }
        return s;
    }
    double c_right(int n, double x) const {
        double s = right.slow(n).eval(d - x);
        for (int l = 0; l < n; ++l) {
            int slot = n - l;
            if (slot <= left.fast(l).tail.order())
                s -= scalar_to_double(left.fast(l).tail.coeff(slot)) *
                     std::pow(x - a, (double)(l - n));
        }
        return s;
    }

    double eval_partial(double x, double eta, int n_terms,
                        const QuadConfig &cfg = QuadConfig()) const {
        double s = 0, etap = 1;
        double U = (x - a) / eta, V = (d - x) / eta;
        double mid = 0.5 * (a + d);
        for (int n = 0; n < n_terms && n < left.eta_order() && n < right.eta_order(); ++n) {
            double cn = x <= mid ? c_left(n, x) : c_right(n, x);
            double gv = 0, hv = 0;
            if (left.fast(n).expr)
                gv = left.fast(n).expr->eval(U, cfg);
            else if (!left.fast(n).tail.is_zero())
                gv = left.fast(n).tail.eval_partial(U);
            if (right.fast(n).expr)
                hv = right.fast(n).expr->eval(V, cfg);
            else if (!right.fast(n).tail.is_zero())
                hv = right.fast(n).tail.eval_partial(V);
            s += (cn + gv + hv) * etap;
            etap *= eta;
        }
        return s;
    }
};

// Merge two one-point expansions sharing the slow region [b, c].
template <class T>
TwoPointExpansion<T> two_point_merge(const CombinedSeries<T> &left, double a,
                                     const CombinedSeries<T> &right, double d, double overlap_lo,
                                     double overlap_hi, double tol = 1e-8) {
    TwoPointExpansion<T> m;
    m.a = a;
    m.d = d;
    m.left = left;
    m.right = right;
    int N = std::min(left.eta_order(), right.eta_order());
    for (int n = 0; n < N; ++n) {
        for (int s = 0; s <= 4; ++s) {
            double x = overlap_lo + (overlap_hi - overlap_lo) * s / 4.0;
            double diff = std::abs(m.c_left(n, x) - m.c_right(n, x));
            if (diff > tol)
                throw domain_error("two_point_merge: slow parts disagree on the overlap at level " +
                                   std::to_string(n));
        }
    }
    return m;
}

// ---- reciprocals ----

template <class T> struct InvertResult {
    bool degenerate = false;
    bool support_ok = false;
    std::string reason;
    int first_level = -1;          // N of C(y)
    int inner_valuation = 0;       // M of C(y)
    int k = 0, l = 0;              // normalization exponents eta^{-k} x^l
    int k_reciprocal = 0;          // eta power: eta^{k_reciprocal}/y has the DAC
    std::optional<int> violating_level;
    std::optional<CombinedSeries<T>> reciprocal;
};

namespace detail {

// Valuation of h_n as an expansion at infinity; +infinity (represented by
// INT_MAX) when flat within truncation.
template <class T> int inner_row_valuation(const InnerRow<T> &r) {
    for (size_t l = r.poly.size(); l-- > 0;)
        if (!scalar_is_zero(r.poly[l]))
            return -(int)l;
    for (int m = 1; m <= r.fast.tail.order(); ++m)
        if (!scalar_is_zero(r.fast.tail.coeff(m)))
            return m;
    return INT32_MAX;
}

} // namespace detail

template <class T> InvertResult<T> invert_classify(const CombinedSeries<T> &y) {
    InvertResult<T> out;
    InnerSeq<T> inner = extract_inner(y);
    int N = -1;
    for (int n = 0; n < inner.levels(); ++n)
        if (detail::inner_row_valuation(inner.rows[(size_t)n]) != INT32_MAX) {
            N = n;
            break;
        }
    if (N < 0) {
        out.degenerate = true;
        out.reason = "all inner coefficients vanish within truncation; cannot decide";
        return out;
    }
    int M = detail::inner_row_valuation(inner.rows[(size_t)N]);
    out.first_level = N;
    out.inner_valuation = M;
    for (int n = N + 1; n < inner.levels(); ++n) {
        int vn = detail::inner_row_valuation(inner.rows[(size_t)n]);
        if (vn < M - (n - N)) {
            out.violating_level = n;
            out.reason = "support condition val(h_n) >= M-n+N fails at n=" + std::to_string(n);
            return out;
        }
    }
    out.support_ok = true;
    out.k = N + M;
    out.l = M;
    out.k_reciprocal = M >= 0 ? out.k : out.k - out.l;

    // Normalize z = eta^{-k} x^l y and invert through u -> 1/u.
    CombinedSeries<T> z = y;
    if (M > 0) {
        CombinedSeries<T> xm(y.p(), y.eta_order(), y.slow_order(), y.fast_order());
        if (M < y.slow_order())
            xm.slow(0).c[(size_t)M] = scalar_traits<T>::one();
        else
            throw domain_error("invert_classify: slow truncation too small for x^M");
        z = mul(z, xm);
    } else if (M < 0) {
        CombinedSeries<T> Xm(y.p(), y.eta_order(), y.slow_order(), y.fast_order());
        if (-M <= y.fast_order()) {
            Xm.fast(0).tail.c[(size_t)(-M) - 1] = scalar_traits<T>::one();
            Xm.fast(0).expr = FastExpr<T>::monomial(M);
        } else {
            throw domain_error("invert_classify: fast truncation too small for X^M");
        }
        z = mul(z, Xm);
    }
    // x^l = eta^l X^l, so the eta normalization differs between the two paths.
    z = shift_down(z, M >= 0 ? out.k : out.k - out.l);
    T c0 = z.slow_order() > 0 ? z.slow(0).c[0] : scalar_traits<T>::zero();
    if (scalar_is_zero(c0)) {
        out.support_ok = false;
        out.reason = "normalized series has vanishing leading slow value at 0";
        return out;
    }
    // Taylor of u -> 1/u at c0: (-1)^i / c0^{i+1}
    int terms = z.eta_order() + std::max(z.slow_order(), z.fast_order()) + 2;
    std::vector<T> inv_taylor((size_t)terms);
    T cp = scalar_traits<T>::one() / c0;
    for (int i = 0; i < terms; ++i) {
        inv_taylor[(size_t)i] = (i % 2 ? -cp : cp);
        cp = cp / c0;
    }
    CombinedSeries<T> invz = compose_analytic(inv_taylor, z);
    // eta^{k_rec} / y = x^l / z (or X^l / z when l < 0)
    if (out.l > 0) {
        CombinedSeries<T> xl(y.p(), y.eta_order(), y.slow_order(), y.fast_order());
        if (out.l < y.slow_order()) {
            xl.slow(0).c[(size_t)out.l] = scalar_traits<T>::one();
            invz = mul(invz, xl);
        } else {
            throw domain_error("invert_classify: slow truncation too small for x^l");
        }
    } else if (out.l < 0) {
        CombinedSeries<T> Xl(y.p(), y.eta_order(), y.slow_order(), y.fast_order());
        Xl.fast(0).tail.c[(size_t)(-out.l) - 1] = scalar_traits<T>::one();
        Xl.fast(0).expr = FastExpr<T>::monomial(out.l);
        invz = mul(invz, Xl);
    }
    out.reciprocal = invz;
    return out;
}

} // namespace dacx
