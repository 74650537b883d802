#pragma once

#include <algorithm>
#include <vector>

#include "dacx/errors.hpp"
#include "dacx/scalar.hpp"

namespace dacx {

// Truncated Taylor germ at x = 0: coefficients a_0..a_{M-1}.
template <class T> struct SlowSeries {
    std::vector<T> c;

    SlowSeries() = default;
    explicit SlowSeries(std::vector<T> coeffs) : c(std::move(coeffs)) {}
    static SlowSeries zero(int order) {
        return SlowSeries(std::vector<T>((size_t)order, scalar_traits<T>::zero()));
    }
    static SlowSeries constant(const T &v, int order) {
        SlowSeries s = zero(order);
        if (order > 0)
            s.c[0] = v;
        return s;
    }

    int order() const { return (int)c.size(); }
    bool is_zero() const {
        for (const auto &v : c)
            if (!scalar_is_zero(v))
                return false;
        return true;
    }
    const T &coeff(int m) const { return c[(size_t)m]; }

    // Horner evaluation of the truncated polynomial.
    double eval(double x) const {
        double v = 0;
        for (size_t i = c.size(); i-- > 0;)
            v = v * x + scalar_to_double(c[i]);
        return v;
    }
    T eval_exact(const T &x) const {
        T v = scalar_traits<T>::zero();
        for (size_t i = c.size(); i-- > 0;)
            v = v * x + c[i];
        return v;
    }
};

// Asymptotic tail at infinity without constant term: coefficients of
// X^{-1}..X^{-M}, stored c[0]..c[M-1].
template <class T> struct FastTail {
    std::vector<T> c;

    FastTail() = default;
    explicit FastTail(std::vector<T> coeffs) : c(std::move(coeffs)) {}
    static FastTail zero(int order) {
        return FastTail(std::vector<T>((size_t)order, scalar_traits<T>::zero()));
    }

    int order() const { return (int)c.size(); }
    bool is_zero() const {
        for (const auto &v : c)
            if (!scalar_is_zero(v))
                return false;
        return true;
    }
    const T &coeff(int m) const { return c[(size_t)(m - 1)]; } // m = 1..M

    // Partial sum of the asymptotic series at X.
    double eval_partial(double X) const {
        double v = 0, xi = 1.0 / X;
        double acc = xi;
        for (const auto &g : c) {
            v += scalar_to_double(g) * acc;
            acc *= xi;
        }
        return v;
    }
};

// Sa(x) = (a(x)-a(0))/x: shift-left on Taylor coefficients.
template <class T> SlowSeries<T> slow_shift(const SlowSeries<T> &a) {
    if (a.order() == 0)
        throw domain_error("slow_shift: empty series");
    return SlowSeries<T>(std::vector<T>(a.c.begin() + 1, a.c.end()));
}

// Tg(X) = Xg(X) - g_1: shift-left on tail coefficients.
template <class T> FastTail<T> fast_shift(const FastTail<T> &g) {
    if (g.order() == 0)
        throw domain_error("fast_shift: empty tail");
    return FastTail<T>(std::vector<T>(g.c.begin() + 1, g.c.end()));
}

template <class T> SlowSeries<T> slow_shift_n(SlowSeries<T> a, int n) {
    for (int i = 0; i < n; ++i)
        a = slow_shift(a);
    return a;
}

template <class T> FastTail<T> fast_shift_n(FastTail<T> g, int n) {
    for (int i = 0; i < n; ++i)
        g = fast_shift(g);
    return g;
}

// ----- Taylor polynomial helpers shared by the algebra and the solvers -----

template <class T>
std::vector<T> taylor_add(const std::vector<T> &a, const std::vector<T> &b) {
    std::vector<T> r(std::max(a.size(), b.size()), scalar_traits<T>::zero());
    for (size_t i = 0; i < a.size(); ++i)
        r[i] = r[i] + a[i];
    for (size_t i = 0; i < b.size(); ++i)
        r[i] = r[i] + b[i];
    return r;
}

template <class T>
std::vector<T> taylor_mul(const std::vector<T> &a, const std::vector<T> &b, int order) {
    std::vector<T> r((size_t)order, scalar_traits<T>::zero());
    for (size_t i = 0; i < a.size() && i < (size_t)order; ++i) {
        if (scalar_is_zero(a[i]))
            continue;
        for (size_t j = 0; j < b.size() && i + j < (size_t)order; ++j)
            r[i + j] = r[i + j] + a[i] * b[j];
    }
    return r;
}

template <class T> std::vector<T> taylor_derivative(const std::vector<T> &a) {
    if (a.empty())
        return {};
    std::vector<T> r(a.size() - 1, scalar_traits<T>::zero());
    for (size_t m = 1; m < a.size(); ++m)
        r[m - 1] = a[m] * scalar_traits<T>::from_int((long long)m);
    return r;
}

// Antiderivative vanishing at 0; the caller fixes the constant.
template <class T> std::vector<T> taylor_antiderivative(const std::vector<T> &a) {
    std::vector<T> r(a.size() + 1, scalar_traits<T>::zero());
    for (size_t m = 0; m < a.size(); ++m)
        r[m + 1] = a[m] / scalar_traits<T>::from_int((long long)(m + 1));
    return r;
}

template <class T> SlowSeries<T> slow_derivative(const SlowSeries<T> &a) {
    return SlowSeries<T>(taylor_derivative(a.c));
}

template <class T> bool all_zero(const std::vector<T> &v) {
    for (const auto &x : v)
        if (!scalar_is_zero(x))
            return false;
    return true;
}

} // namespace dacx
