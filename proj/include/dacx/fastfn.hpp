#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dacx/errors.hpp"
#include "dacx/fastfn_core.hpp"
#include "dacx/series.hpp"

namespace dacx {

// Expression trees over the fast special functions. Trees are immutable and
// share children; eval() is pure. Scale coefficients live in the same scalar
// mode T as the series algebra so tails stay exact in rational mode.
enum class FastKind {
    Zero,
    Monomial,   // X^k, k may be negative
    ExpPow,     // e^{s X^p}, s = +-1
    SpecialU,   // U_j^{ray}: solution of U' = pX^{p-1}U + X^{j-1} decaying at the ray
    JApply,     // ray integral operator applied to the child
    Dawson,     // e^{-X^p} int_0^X e^{T^p} dT (attracting kernel, base 0)
    Sum,
    Scale,
    Product,
    Derivative,
    TShift,     // Tf = Xf - f_1
    BorelKernel // truncated-Laplace synthesis of a prescribed tail (gevrey)
};

template <class T> class FastExpr;

template <class T> struct FastExprNode {
    FastKind kind = FastKind::Zero;
    int a = 0, b = 0, c = 0; // Monomial: a=k. ExpPow: a=s, b=p. SpecialU: a=p, b=j, c=ray.
                             // JApply: a=ray, b=p. Dawson: a=p. BorelKernel: a=p, b=shift.
    T scalar = scalar_traits<T>::zero();
    std::vector<FastExpr<T>> kids;
    // BorelKernel payload: sum of t_coeffs[i] t^{t_m0+i} under the kernel, plus
    // the exact asymptotic coefficients the synthesis was built from.
    std::vector<double> t_coeffs;
    int t_m0 = 0;
    double t_max = 0;
    std::vector<T> prescribed_tail;
};

// Full expansion at infinity: polynomial part (X^0..) plus tail (X^{-1}..).
template <class T> struct AsymExpansion {
    std::vector<T> poly;
    std::vector<T> tail;

    static AsymExpansion zero(int M) {
        AsymExpansion e;
        e.tail.assign((size_t)M, scalar_traits<T>::zero());
        return e;
    }
    int tail_order() const { return (int)tail.size(); }
    int poly_degree() const {
        for (size_t i = poly.size(); i-- > 0;)
            if (!scalar_is_zero(poly[i]))
                return (int)i;
        return -1;
    }
    // coefficient of X^{s}, s ranging over [-tail_order, poly_degree]
    T coeff_power(int s) const {
        if (s >= 0)
            return s < (int)poly.size() ? poly[(size_t)s] : scalar_traits<T>::zero();
        int m = -s;
        return m <= (int)tail.size() ? tail[(size_t)m - 1] : scalar_traits<T>::zero();
    }
    void add_power(int s, const T &v) {
        if (s >= 0) {
            if ((int)poly.size() <= s)
                poly.resize((size_t)s + 1, scalar_traits<T>::zero());
            poly[(size_t)s] = poly[(size_t)s] + v;
        } else {
            int m = -s;
            if (m <= (int)tail.size())
                tail[(size_t)m - 1] = tail[(size_t)m - 1] + v;
        }
    }
};

template <class T>
AsymExpansion<T> expansion_add(const AsymExpansion<T> &x, const AsymExpansion<T> &y, int M) {
    AsymExpansion<T> r = AsymExpansion<T>::zero(M);
    r.poly = taylor_add(x.poly, y.poly);
    for (int m = 1; m <= M; ++m)
        r.tail[(size_t)m - 1] = x.coeff_power(-m) + y.coeff_power(-m);
    return r;
}

template <class T>
AsymExpansion<T> expansion_scale(const AsymExpansion<T> &x, const T &c) {
    AsymExpansion<T> r = x;
    for (auto &v : r.poly)
        v = v * c;
    for (auto &v : r.tail)
        v = v * c;
    return r;
}

template <class T>
AsymExpansion<T> expansion_mul(const AsymExpansion<T> &x, const AsymExpansion<T> &y, int M) {
    AsymExpansion<T> r = AsymExpansion<T>::zero(M);
    int dx = (int)x.poly.size() - 1, dy = (int)y.poly.size() - 1;
    for (int sx = -(int)x.tail.size(); sx <= dx; ++sx) {
        T cx = x.coeff_power(sx);
        if (scalar_is_zero(cx))
            continue;
        for (int sy = -(int)y.tail.size(); sy <= dy; ++sy) {
            T cy = y.coeff_power(sy);
            if (scalar_is_zero(cy))
                continue;
            int s = sx + sy;
            if (s >= -M)
                r.add_power(s, cx * cy);
        }
    }
    return r;
}

template <class T> class FastExpr {
  public:
    FastExpr() : n_(zero_node()) {}

    static FastExpr zero() { return FastExpr(); }
    static FastExpr monomial(int k) {
        auto n = std::make_shared<FastExprNode<T>>();
        n->kind = FastKind::Monomial;
        n->a = k;
        return FastExpr(std::move(n));
    }
    static FastExpr exp_pow(int sign, int p) {
        auto n = std::make_shared<FastExprNode<T>>();
        n->kind = FastKind::ExpPow;
        n->a = sign;
        n->b = p;
        return FastExpr(std::move(n));
    }
    static FastExpr special_u(int p, int j, int ray) {
        auto n = std::make_shared<FastExprNode<T>>();
        n->kind = FastKind::SpecialU;
        n->a = p;
        n->b = j;
        n->c = ray;
        return FastExpr(std::move(n));
    }
    static FastExpr dawson(int p) {
        auto n = std::make_shared<FastExprNode<T>>();
        n->kind = FastKind::Dawson;
        n->a = p;
        return FastExpr(std::move(n));
    }
    static FastExpr j_node(int ray, int p, FastExpr v) {
        auto n = std::make_shared<FastExprNode<T>>();
        n->kind = FastKind::JApply;
        n->a = ray;
        n->b = p;
        n->kids.push_back(std::move(v));
        return FastExpr(std::move(n));
    }
    static FastExpr sum(std::vector<FastExpr> kids) {
        std::vector<FastExpr> keep;
        for (auto &k : kids)
            if (!k.is_zero())
                keep.push_back(std::move(k));
        if (keep.empty())
            return zero();
        if (keep.size() == 1)
            return keep[0];
        auto n = std::make_shared<FastExprNode<T>>();
        n->kind = FastKind::Sum;
        n->kids = std::move(keep);
        return FastExpr(std::move(n));
    }
    static FastExpr scale(const T &c, FastExpr child) {
        if (scalar_is_zero(c) || child.is_zero())
            return zero();
        auto n = std::make_shared<FastExprNode<T>>();
        n->kind = FastKind::Scale;
        n->scalar = c;
        n->kids.push_back(std::move(child));
        return FastExpr(std::move(n));
    }
    static FastExpr product(std::vector<FastExpr> kids) {
        for (const auto &k : kids)
            if (k.is_zero())
                return zero();
        if (kids.size() == 1)
            return kids[0];
        auto n = std::make_shared<FastExprNode<T>>();
        n->kind = FastKind::Product;
        n->kids = std::move(kids);
        return FastExpr(std::move(n));
    }
    static FastExpr derivative(FastExpr child) {
        if (child.is_zero())
            return zero();
        auto n = std::make_shared<FastExprNode<T>>();
        n->kind = FastKind::Derivative;
        n->kids.push_back(std::move(child));
        return FastExpr(std::move(n));
    }
    static FastExpr tshift(FastExpr child) {
        if (child.is_zero())
            return zero();
        auto n = std::make_shared<FastExprNode<T>>();
        n->kind = FastKind::TShift;
        n->kids.push_back(std::move(child));
        return FastExpr(std::move(n));
    }
    static FastExpr borel_kernel(int p, int shift, std::vector<double> t_coeffs, int t_m0,
                                 double t_max, std::vector<T> prescribed_tail) {
        auto n = std::make_shared<FastExprNode<T>>();
        n->kind = FastKind::BorelKernel;
        n->a = p;
        n->b = shift;
        n->t_coeffs = std::move(t_coeffs);
        n->t_m0 = t_m0;
        n->t_max = t_max;
        n->prescribed_tail = std::move(prescribed_tail);
        return FastExpr(std::move(n));
    }

    const FastExprNode<T> &node() const { return *n_; }
    bool is_zero() const { return n_->kind == FastKind::Zero; }

    double eval(double X, const QuadConfig &cfg = QuadConfig()) const;
    AsymExpansion<T> expansion(int M) const;

  private:
    explicit FastExpr(std::shared_ptr<const FastExprNode<T>> n) : n_(std::move(n)) {}
    static std::shared_ptr<const FastExprNode<T>> zero_node() {
        static const auto z = std::make_shared<FastExprNode<T>>();
        return z;
    }
    std::shared_ptr<const FastExprNode<T>> n_;
};

// Structural derivative: every node has an exact rewrite via its defining ODE.
template <class T> FastExpr<T> fast_derivative(const FastExpr<T> &e) {
    using E = FastExpr<T>;
    using tr = scalar_traits<T>;
    const auto &n = e.node();
    switch (n.kind) {
    case FastKind::Zero:
        return E::zero();
    case FastKind::Monomial:
        if (n.a == 0)
            return E::zero();
        return E::scale(tr::from_int(n.a), E::monomial(n.a - 1));
    case FastKind::ExpPow: // (e^{sX^p})' = s p X^{p-1} e^{sX^p}
        return E::scale(tr::from_int((long long)n.a * n.b),
                        E::product({E::monomial(n.b - 1), e}));
    case FastKind::SpecialU: // U' = pX^{p-1}U + X^{j-1}
        return E::sum({E::scale(tr::from_int(n.a), E::product({E::monomial(n.a - 1), e})),
                       E::monomial(n.b - 1)});
    case FastKind::Dawson: // D' = -pX^{p-1}D + 1
        return E::sum({E::scale(tr::from_int(-n.a), E::product({E::monomial(n.a - 1), e})),
                       E::monomial(0)});
    case FastKind::JApply: // (Jv)' = pX^{p-1}(Jv) + v
        return E::sum({E::scale(tr::from_int(n.b), E::product({E::monomial(n.b - 1), e})),
                       n.kids[0]});
    case FastKind::Sum: {
        std::vector<E> kids;
        for (const auto &k : n.kids)
            kids.push_back(fast_derivative(k));
        return E::sum(std::move(kids));
    }
    case FastKind::Scale:
        return E::scale(n.scalar, fast_derivative(n.kids[0]));
    case FastKind::Product: {
        std::vector<E> terms;
        for (size_t i = 0; i < n.kids.size(); ++i) {
            std::vector<E> factors = n.kids;
            factors[i] = fast_derivative(n.kids[i]);
            terms.push_back(E::product(std::move(factors)));
        }
        return E::sum(std::move(terms));
    }
    case FastKind::Derivative:
        return E::derivative(e);
    case FastKind::TShift: // (Xf - f_1)' = f + X f'
        return E::sum({n.kids[0],
                       E::product({E::monomial(1), fast_derivative(n.kids[0])})});
    case FastKind::BorelKernel: {
        // g = X^{b+p} L(phi): g' = (b+p)/X g - p X^{p-1} X^{b+p} L(t^p phi)
        std::vector<double> shifted = n.t_coeffs;
        E lifted = E::borel_kernel(n.a, n.b + n.a, shifted, n.t_m0 + n.a, n.t_max, {});
        return E::sum({E::scale(tr::from_int(n.b + n.a), E::product({E::monomial(-1), e})),
                       E::scale(tr::from_int(-n.a),
                                E::product({E::monomial(n.a - 1 - n.a), lifted}))});
    }
    }
    return E::zero();
}

template <class T>
double FastExpr<T>::eval(double X, const QuadConfig &cfg) const {
    const auto &n = *n_;
    switch (n.kind) {
    case FastKind::Zero:
        return 0;
    case FastKind::Monomial:
        return std::pow(X, (double)n.a);
    case FastKind::ExpPow:
        return std::exp(n.a * std::pow(X, (double)n.b));
    case FastKind::SpecialU:
        return u_eval_core(n.a, n.b, n.c, X, cfg);
    case FastKind::Dawson:
        return dawson_eval(n.a, X, cfg);
    case FastKind::JApply: {
        const FastExpr<T> child = n.kids[0];
        int deg = std::max(0, child.expansion(1).poly_degree());
        auto v = [&](double t) { return child.eval(t, cfg); };
        return japply_eval_core(n.b, n.a, v, deg, X, cfg);
    }
    case FastKind::Sum: {
        double s = 0;
        for (const auto &k : n.kids)
            s += k.eval(X, cfg);
        return s;
    }
    case FastKind::Scale:
        return scalar_to_double(n.scalar) * n.kids[0].eval(X, cfg);
    case FastKind::Product: {
        double s = 1;
        for (const auto &k : n.kids)
            s *= k.eval(X, cfg);
        return s;
    }
    case FastKind::Derivative:
        return fast_derivative(n.kids[0]).eval(X, cfg);
    case FastKind::TShift: {
        AsymExpansion<T> ex = n.kids[0].expansion(1);
        double g1 = ex.tail.empty() ? 0.0 : scalar_to_double(ex.tail[0]);
        return X * n.kids[0].eval(X, cfg) - g1;
    }
    case FastKind::BorelKernel: {
        if (X == 0 || n.t_coeffs.empty())
            return 0;
        int p = n.a;
        double Xp = std::pow(std::abs(X), (double)p);
        auto phi = [&](double t) {
            double s = 0, tm = std::pow(t, (double)n.t_m0);
            for (double c : n.t_coeffs) {
                s += c * tm;
                tm *= t;
            }
            return s;
        };
        auto f = [&](double t) {
            return std::exp(-std::pow(t, (double)p) * Xp) * phi(t) * p *
                   std::pow(t, (double)(p - 1));
        };
        double integral = integrate_gk(f, 0, n.t_max, cfg.abs_tol, cfg.max_depth);
        return std::pow(X, (double)(n.b + p)) * integral;
    }
    }
    return 0;
}

namespace detail {

// Tail of W solving W' = pX^{p-1} W + v, from v's full expansion. The top
// power of W is deg(v) - (p-1); the downward recurrence fixes everything.
template <class T>
AsymExpansion<T> japply_expansion(int p, const AsymExpansion<T> &v, int M) {
    AsymExpansion<T> w = AsymExpansion<T>::zero(M);
    int top = v.poly_degree() - (p - 1);
    if (top >= 0)
        w.poly.assign((size_t)top + 1, scalar_traits<T>::zero());
    T pinv = scalar_traits<T>::one() / scalar_traits<T>::from_int(p);
    for (int m = top; m >= -M; --m) {
        // p w_m = (m+p) w_{m+p} - v_{m+p-1}
        T rhs = scalar_traits<T>::from_int(m + p) * w.coeff_power(m + p) -
                v.coeff_power(m + p - 1);
        T val = rhs * pinv;
        if (!scalar_is_zero(val)) {
            if (m >= 0)
                w.poly[(size_t)m] = val;
            else
                w.tail[(size_t)(-m) - 1] = val;
        }
    }
    return w;
}

} // namespace detail

template <class T> AsymExpansion<T> FastExpr<T>::expansion(int M) const {
    using tr = scalar_traits<T>;
    const auto &n = *n_;
    AsymExpansion<T> r = AsymExpansion<T>::zero(M);
    switch (n.kind) {
    case FastKind::Zero:
        return r;
    case FastKind::Monomial:
        r.add_power(n.a, tr::one());
        return r;
    case FastKind::ExpPow:
        if (n.a > 0)
            throw domain_error("expansion: e^{+X^p} has no asymptotic expansion at the ray");
        return r; // flat
    case FastKind::SpecialU: {
        std::vector<T> u((size_t)M + 1, tr::zero());
        if (n.a - n.b >= 1 && n.a - n.b <= M)
            u[(size_t)(n.a - n.b)] = -tr::one() / tr::from_int(n.a);
        for (int m = 1; m + n.a <= M; ++m)
            u[(size_t)(m + n.a)] = -tr::from_int(m) / tr::from_int(n.a) * u[(size_t)m];
        r.tail.assign(u.begin() + 1, u.end());
        return r;
    }
    case FastKind::Dawson: {
        std::vector<T> u((size_t)M + 1, tr::zero());
        if (n.a - 1 >= 1 && n.a - 1 <= M)
            u[(size_t)(n.a - 1)] = tr::one() / tr::from_int(n.a);
        for (int m = 1; m + n.a <= M; ++m)
            u[(size_t)(m + n.a)] = tr::from_int(m) / tr::from_int(n.a) * u[(size_t)m];
        r.tail.assign(u.begin() + 1, u.end());
        return r;
    }
    case FastKind::JApply:
        return detail::japply_expansion(n.b, n.kids[0].expansion(M), M);
    case FastKind::Sum: {
        for (const auto &k : n.kids)
            r = expansion_add(r, k.expansion(M), M);
        return r;
    }
    case FastKind::Scale:
        return expansion_scale(n.kids[0].expansion(M), n.scalar);
    case FastKind::Product: {
        // Partner polynomial degrees extend the order each factor needs.
        std::vector<AsymExpansion<T>> probe;
        int degsum = 0;
        for (const auto &k : n.kids) {
            probe.push_back(k.expansion(1));
            degsum += std::max(0, probe.back().poly_degree());
        }
        AsymExpansion<T> acc = n.kids[0].expansion(M + degsum);
        for (size_t i = 1; i < n.kids.size(); ++i)
            acc = expansion_mul(acc, n.kids[i].expansion(M + degsum), M + degsum);
        acc.tail.resize((size_t)M);
        return acc;
    }
    case FastKind::Derivative: {
        AsymExpansion<T> ex = n.kids[0].expansion(M);
        for (int s = -(int)ex.tail.size(); s <= ex.poly_degree(); ++s) {
            T c = ex.coeff_power(s);
            if (!scalar_is_zero(c) && s != 0 && s - 1 >= -M)
                r.add_power(s - 1, tr::from_int(s) * c);
        }
        return r;
    }
    case FastKind::TShift: {
        AsymExpansion<T> ex = n.kids[0].expansion(M + 1);
        for (int s = -(int)ex.tail.size(); s <= ex.poly_degree(); ++s) {
            T c = ex.coeff_power(s);
            if (scalar_is_zero(c))
                continue;
            if (s == -1)
                continue; // Xf - f_1 removes exactly this term
            if (s + 1 >= -M)
                r.add_power(s + 1, c);
        }
        return r;
    }
    case FastKind::BorelKernel: {
        for (int m = 1; m <= M; ++m)
            r.tail[(size_t)m - 1] = (size_t)m <= n.prescribed_tail.size()
                                        ? n.prescribed_tail[(size_t)m - 1]
                                        : tr::zero();
        return r;
    }
    }
    return r;
}

// ---- public operations ----

// Exact coefficients of the decaying formal solution of U' = pX^{p-1}U +
// X^{j-1}. The formal series is the same on both rays (it is the unique
// formal solution), so `ray` only participates in the API.
template <class T> FastTail<T> u_tail(int p, int j, int /*ray*/, int M) {
    if (p < 1 || M < 0)
        throw domain_error("u_tail: need p >= 1 and M >= 0");
    auto ex = FastExpr<T>::special_u(p, j, -1).expansion(M);
    return FastTail<T>(ex.tail);
}

inline double u_eval(int p, int j, int ray, double X, const QuadConfig &cfg = QuadConfig()) {
    return FastExpr<double>::special_u(p, j, ray).eval(X, cfg);
}

// Wraps v in a JApply node after probing the growth precondition.
template <class T>
FastExpr<T> j_apply(int ray, int p, const FastExpr<T> &v, const QuadConfig &cfg = QuadConfig()) {
    if (v.is_zero())
        return FastExpr<T>::zero();
    FastExpr<T> node = FastExpr<T>::j_node(ray, p, v);
    try {
        node.eval(0.0, cfg); // diverging quadrature surfaces here
    } catch (const numeric_error &e) {
        throw domain_error(std::string("j_apply: growth precondition violated: ") + e.what());
    }
    return node;
}

template <class T>
double expr_eval(const FastExpr<T> &e, double X, const QuadConfig &cfg = QuadConfig()) {
    return e.eval(X, cfg);
}

// Tail plus polynomial-part bookkeeping.
template <class T>
std::pair<FastTail<T>, std::vector<T>> expr_tail(const FastExpr<T> &e, int M) {
    AsymExpansion<T> ex = e.expansion(M);
    return {FastTail<T>(ex.tail), ex.poly};
}

} // namespace dacx
