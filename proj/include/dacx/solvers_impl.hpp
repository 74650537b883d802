#pragma once

// Template implementations for solvers.hpp.

namespace dacx {

namespace detail {

// (1/p)^l prefactors are tracked explicitly so rational mode stays exact.
template <class T> T inv_p_pow(int p, int l) {
    T r = scalar_traits<T>::one();
    T ip = scalar_traits<T>::one() / scalar_traits<T>::from_int(p);
    for (int i = 0; i < l; ++i)
        r = r * ip;
    return r;
}

} // namespace detail

template <class T>
CombinedSeries<T> dac_linear_model(const std::vector<T> &g_taylor, int p, int ray, int N, int M) {
    if (p < 2 || p % 2 != 0)
        throw domain_error("dac_linear_model: even p >= 2 required");
    int levels = N / p + 1;
    if ((int)g_taylor.size() < M + p * levels)
        throw domain_error("dac_linear_model: need g Taylor data to order M + p*(N/p + 1)");
    CombinedSeries<T> out(p, N, M, M);
    T ip = scalar_traits<T>::one() / scalar_traits<T>::from_int(p);
    std::vector<T> G = g_taylor; // current remainder jet, rescaled each level
    T pref = scalar_traits<T>::one();
    for (int l = 0; l <= levels; ++l) {
        // fast terms at eta^{p l + k + 1}: (G_l)_k U_{k+1}^{ray}
        for (int k = 0; k <= p - 2; ++k) {
            int lvl = p * l + k + 1;
            if (lvl >= N || (size_t)k >= G.size())
                continue;
            T c = pref * G[(size_t)k];
            if (scalar_is_zero(c))
                continue;
            auto &f = out.fast(lvl);
            FastTail<T> ut = u_tail<T>(p, k + 1, ray, M);
            for (int m = 1; m <= M; ++m)
                f.tail.c[(size_t)m - 1] = f.tail.c[(size_t)m - 1] + c * ut.coeff(m);
            FastExpr<T> term = FastExpr<T>::scale(c, FastExpr<T>::special_u(p, k + 1, ray));
            f.expr = f.expr ? FastExpr<T>::sum({*f.expr, term}) : term;
        }
        // slow term at eta^{p(l+1)}: -(1/p)^{l+1} S^{p-1} G_l
        std::vector<T> h(G.begin() + std::min<size_t>(G.size(), (size_t)(p - 1)), G.end());
        int lvl = p * (l + 1);
        if (lvl < N) {
            T c = -pref * ip;
            for (int m = 0; m < M && m < (int)h.size(); ++m)
                out.slow(lvl).c[(size_t)m] = c * h[(size_t)m];
        }
        G = taylor_derivative(h);
        pref = pref * ip;
        if (all_zero(G))
            break;
    }
    // levels with no fast content keep an explicit zero expr (evaluable DAC)
    for (int n = 0; n < N; ++n)
        if (!out.fast(n).expr)
            out.fast(n).expr = FastExpr<T>::zero();
    return out;
}

template <class T>
CombinedSeries<T> dac_initial_layer(const std::vector<T> &g_taylor,
                                    const std::vector<T> &c_series, int N, int M) {
    int levels = N / 2 + 1;
    if ((int)g_taylor.size() < M + 2 * levels)
        throw domain_error("dac_initial_layer: need g Taylor data to order M + 2*(N/2 + 1)");
    auto c_at = [&](int n) {
        return n < (int)c_series.size() ? c_series[(size_t)n] : scalar_traits<T>::zero();
    };
    CombinedSeries<T> out(2, N, M, M);
    T half = scalar_traits<T>::from_ratio(1, 2);
    FastExpr<T> gauss = FastExpr<T>::exp_pow(-1, 2);
    FastExpr<T> layer_u = FastExpr<T>::dawson(2);
    FastTail<T> layer_tail = expr_tail(layer_u, M).first;

    std::vector<T> W = g_taylor; // (-1/2 DS)^n g
    std::vector<T> W_prev;
    for (int n = 0; n <= levels; ++n) {
        // even level 2n: slow a_{2n} (n>=1) and fast d_n e^{-X^2}
        if (2 * n < N) {
            auto &f = out.fast(2 * n);
            T d;
            if (n == 0) {
                d = c_at(0);
            } else {
                T sw0 = W_prev.size() > 1 ? W_prev[1] : scalar_traits<T>::zero();
                d = c_at(2 * n) - half * sw0;
            }
            if (!scalar_is_zero(d))
                f.expr = FastExpr<T>::scale(d, gauss); // flat: no tail contribution
            else
                f.expr = FastExpr<T>::zero();
            if (n >= 1) {
                // a_{2n} = (1/2) S((-1/2 DS)^{n-1} g)
                for (int m = 0; m < M && m + 1 < (int)W_prev.size(); ++m)
                    out.slow(2 * n).c[(size_t)m] = half * W_prev[(size_t)m + 1];
            }
        }
        // odd level 2n+1: fast b_n U + c_{2n+1} e^{-X^2}
        if (2 * n + 1 < N) {
            auto &f = out.fast(2 * n + 1);
            T b = W.empty() ? scalar_traits<T>::zero() : W[0];
            std::vector<FastExpr<T>> parts;
            if (!scalar_is_zero(b)) {
                for (int m = 1; m <= M; ++m)
                    f.tail.c[(size_t)m - 1] = b * layer_tail.coeff(m);
                parts.push_back(FastExpr<T>::scale(b, layer_u));
            }
            if (!scalar_is_zero(c_at(2 * n + 1)))
                parts.push_back(FastExpr<T>::scale(c_at(2 * n + 1), gauss));
            f.expr = FastExpr<T>::sum(std::move(parts));
        }
        W_prev = W;
        std::vector<T> s(W.begin() + std::min<size_t>(W.size(), 1), W.end());
        W = taylor_derivative(s);
        for (auto &v : W)
            v = -half * v;
    }
    return out;
}

template <class T> CanardSeries<T> canard_alpha(const std::vector<T> &g_taylor, int N) {
    if ((int)g_taylor.size() < N + 2)
        throw domain_error("canard_alpha: need g Taylor data to order N + 2");
    CanardSeries<T> out;
    T half = scalar_traits<T>::from_ratio(1, 2);
    // alpha_0 = -g(0); y_1 = -(1/2) S g; then alpha_n = y_n'(0),
    // y_{n+1} = (1/2) S(y_n' - alpha_n).
    out.alpha.push_back(-g_taylor[0]);
    out.y.push_back({});
    std::vector<T> y(g_taylor.begin() + 1, g_taylor.end());
    for (auto &v : y)
        v = -half * v;
    out.y.push_back(y);
    for (int n = 1; n < N; ++n) {
        std::vector<T> dy = taylor_derivative(y);
        T an = dy.empty() ? scalar_traits<T>::zero() : dy[0];
        out.alpha.push_back(an);
        std::vector<T> next(dy.begin() + std::min<size_t>(dy.size(), 1), dy.end());
        for (auto &v : next)
            v = half * v;
        y = next;
        out.y.push_back(y);
    }
    return out;
}

template <class T>
CombinedSeries<T> dac_controlled_linear(const std::vector<T> &g_taylor, int ray, int N, int M) {
    CombinedSeries<T> out = dac_linear_model<T>(g_taylor, 2, ray, N, M);
    CanardSeries<T> cs = canard_alpha<T>(g_taylor, N / 2 + 1);
    FastTail<T> ut = u_tail<T>(2, 1, ray, M);
    FastExpr<T> u = FastExpr<T>::special_u(2, 1, ray);
    for (int k = 0; (int)k < (int)cs.alpha.size() && 2 * k + 1 < N; ++k) {
        const T &ak = cs.alpha[(size_t)k];
        if (scalar_is_zero(ak))
            continue;
        auto &f = out.fast(2 * k + 1);
        for (int m = 1; m <= M; ++m)
            f.tail.c[(size_t)m - 1] = f.tail.c[(size_t)m - 1] + ak * ut.coeff(m);
        FastExpr<T> term = FastExpr<T>::scale(ak, u);
        f.expr = f.expr ? FastExpr<T>::sum({*f.expr, term}) : term;
    }
    return out;
}

namespace detail {

// Laurent polynomial in x with a bounded pole order (outer level cap).
template <class T> struct Laur {
    int lo = 0;
    std::vector<T> c; // c[i] multiplies x^{lo+i}

    bool zero() const { return all_zero(c); }
    int pole_order() const {
        for (size_t i = 0; i < c.size(); ++i)
            if (!scalar_is_zero(c[i]))
                return std::max(0, -(lo + (int)i));
        return 0;
    }
    T coeff_power(int s) const {
        int i = s - lo;
        return i >= 0 && i < (int)c.size() ? c[(size_t)i] : scalar_traits<T>::zero();
    }
    void trim(int reg_max) {
        // drop leading zeros and powers above reg_max
        while (!c.empty() && scalar_is_zero(c.front())) {
            c.erase(c.begin());
            ++lo;
        }
        while (lo + (int)c.size() - 1 > reg_max && !c.empty())
            c.pop_back();
    }
};

template <class T> Laur<T> laur_add(const Laur<T> &a, const Laur<T> &b, int reg_max) {
    Laur<T> r;
    r.lo = std::min(a.lo, b.lo);
    int hi = std::max(a.lo + (int)a.c.size(), b.lo + (int)b.c.size());
    r.c.assign((size_t)(hi - r.lo), scalar_traits<T>::zero());
    for (size_t i = 0; i < a.c.size(); ++i)
        r.c[(size_t)(a.lo - r.lo) + i] = r.c[(size_t)(a.lo - r.lo) + i] + a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i)
        r.c[(size_t)(b.lo - r.lo) + i] = r.c[(size_t)(b.lo - r.lo) + i] + b.c[i];
    r.trim(reg_max);
    return r;
}

template <class T> Laur<T> laur_mul(const Laur<T> &a, const Laur<T> &b, int reg_max) {
    Laur<T> r;
    if (a.zero() || b.zero())
        return r;
    r.lo = a.lo + b.lo;
    r.c.assign(a.c.size() + b.c.size(), scalar_traits<T>::zero());
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (scalar_is_zero(a.c[i]))
            continue;
        for (size_t j = 0; j < b.c.size(); ++j)
            r.c[i + j] = r.c[i + j] + a.c[i] * b.c[j];
    }
    r.trim(reg_max);
    return r;
}

template <class T> Laur<T> laur_derivative(const Laur<T> &a) {
    Laur<T> r;
    r.lo = a.lo - 1;
    r.c.assign(a.c.size(), scalar_traits<T>::zero());
    for (size_t i = 0; i < a.c.size(); ++i)
        r.c[i] = scalar_traits<T>::from_int(a.lo + (long long)i) * a.c[i];
    return r;
}

} // namespace detail

template <class T>
QuasilinearResult<T> quasilinear_dac(const TriJet<T> &P, int p, int ray, int N, int M,
                                     const QuadConfig &cfg) {
    (void)cfg;
    using detail::Laur;
    int reg_max = M + 1;
    int K = (N - 1) / p; // outer levels v_1..v_K live at eta^{p k}
    int ydeg = 0, edeg = 0, xdeg = (int)P.size() - 1;
    for (const auto &py : P) {
        ydeg = std::max(ydeg, (int)py.size() - 1);
        for (const auto &pe : py)
            edeg = std::max(edeg, (int)pe.size() - 1);
    }

    // ---- outer recursion: v_{k+1} = (v_k' - q_k) / (p x^{p-1}) ----
    std::vector<Laur<T>> v((size_t)K + 2);
    for (int k = 0; k <= K; ++k) {
        // q_k: eps^k coefficient of P(x, sum v_nu eps^nu, eps)
        // powers of Y as eps-arrays of Laurent coefficients
        std::vector<std::vector<Laur<T>>> ypow(
            (size_t)ydeg + 1, std::vector<Laur<T>>((size_t)k + 1));
        ypow[0][0].lo = 0;
        ypow[0][0].c = {scalar_traits<T>::one()};
        for (int m = 1; m <= ydeg; ++m)
            for (int q = m; q <= k; ++q) {
                Laur<T> acc;
                for (int nu = 1; nu <= q - (m - 1); ++nu)
                    acc = detail::laur_add(
                        acc, detail::laur_mul(ypow[(size_t)m - 1][(size_t)(q - nu)],
                                              v[(size_t)nu], reg_max),
                        reg_max);
                ypow[(size_t)m][(size_t)q] = acc;
            }
        Laur<T> qk;
        for (int j = 0; j <= xdeg; ++j)
            for (int m = 0; m <= ydeg && m < (int)P[(size_t)j].size(); ++m)
                for (int l = 0; l <= edeg && l < (int)P[(size_t)j][(size_t)m].size(); ++l) {
                    if (l > k || (m == 0 && l != k) || (m > 0 && k - l < m))
                        continue;
                    const T &coef = P[(size_t)j][(size_t)m][(size_t)l];
                    if (scalar_is_zero(coef))
                        continue;
                    Laur<T> term = m == 0 ? Laur<T>{0, {scalar_traits<T>::one()}}
                                          : ypow[(size_t)m][(size_t)(k - l)];
                    Laur<T> xj{j, std::vector<T>{coef}};
                    qk = detail::laur_add(qk, detail::laur_mul(xj, term, reg_max), reg_max);
                }
        // v_{k+1} = (v_k' - q_k) / (p x^{p-1})
        for (auto &cc : qk.c)
            cc = -cc;
        Laur<T> num = detail::laur_add(detail::laur_derivative(v[(size_t)k]), qk, reg_max);
        num.lo -= p - 1;
        T ip = scalar_traits<T>::one() / scalar_traits<T>::from_int(p);
        for (auto &cc : num.c)
            cc = cc * ip;
        num.trim(reg_max);
        v[(size_t)k + 1] = num;
        int lvl = p * (k + 1);
        if (lvl < N && v[(size_t)k + 1].pole_order() > lvl)
            throw domain_error(
                "quasilinear_dac: outer pole order exceeds the level bound; "
                "incompatible with the existence of a combined expansion");
    }

    // ---- inner recursion: V_n = J^{ray}(G_n) ----
    using E = FastExpr<T>;
    std::vector<E> V((size_t)N, E::zero());
    std::vector<std::vector<E>> Ypow; // Ypow[m][q]: eta^q coefficient of Y^m
    for (int n = 1; n < N; ++n) {
        Ypow.assign((size_t)ydeg + 1, std::vector<E>((size_t)N, E::zero()));
        Ypow[0][0] = E::monomial(0);
        for (int m = 1; m <= ydeg; ++m)
            for (int q = m; q < n; ++q) {
                std::vector<E> terms;
                for (int nu = 1; nu <= q - (m - 1); ++nu)
                    if (!Ypow[(size_t)m - 1][(size_t)(q - nu)].is_zero() &&
                        !V[(size_t)nu].is_zero())
                        terms.push_back(
                            E::product({Ypow[(size_t)m - 1][(size_t)(q - nu)], V[(size_t)nu]}));
                Ypow[(size_t)m][(size_t)q] = E::sum(std::move(terms));
            }
        std::vector<E> gterms;
        for (int j = 0; j <= xdeg; ++j)
            for (int m = 0; m <= ydeg && m < (int)P[(size_t)j].size(); ++m)
                for (int l = 0; l <= edeg && l < (int)P[(size_t)j][(size_t)m].size(); ++l) {
                    int q = n - 1 - j - p * l;
                    if (q < 0 || (m == 0 && q != 0) || (m > 0 && q < m))
                        continue;
                    const T &coef = P[(size_t)j][(size_t)m][(size_t)l];
                    if (scalar_is_zero(coef))
                        continue;
                    E ym = m == 0 ? E::monomial(0) : Ypow[(size_t)m][(size_t)q];
                    if (ym.is_zero())
                        continue;
                    E term = E::scale(coef, j == 0 ? ym : E::product({E::monomial(j), ym}));
                    gterms.push_back(term);
                }
        E Gn = E::sum(std::move(gterms));
        V[(size_t)n] = Gn.is_zero() ? E::zero() : E::j_node(ray, p, Gn);
    }

    // ---- assemble: slow = regular outer parts, fast = inner minus polynomial ----
    QuasilinearResult<T> out{CombinedSeries<T>(p, N, M, M), {}};
    for (int k = 1; k <= K; ++k) {
        int lvl = p * k;
        if (lvl >= N)
            break;
        for (int m = 0; m < M; ++m)
            out.dac.slow(lvl).c[(size_t)m] = v[(size_t)k].coeff_power(m);
    }
    out.inner.assign((size_t)N, FastExpr<T>::zero());
    for (int n = 1; n < N; ++n) {
        out.inner[(size_t)n] = V[(size_t)n];
        if (V[(size_t)n].is_zero()) {
            out.dac.fast(n).expr = FastExpr<T>::zero();
            continue;
        }
        auto ex = V[(size_t)n].expansion(M);
        for (int m = 1; m <= M; ++m)
            out.dac.fast(n).tail.c[(size_t)m - 1] = ex.coeff_power(-m);
        std::vector<FastExpr<T>> strip{V[(size_t)n]};
        for (size_t i = 0; i < ex.poly.size(); ++i)
            if (!scalar_is_zero(ex.poly[i]))
                strip.push_back(
                    FastExpr<T>::scale(-ex.poly[i], FastExpr<T>::monomial((int)i)));
        out.dac.fast(n).expr = FastExpr<T>::sum(std::move(strip));
    }
    for (int n = 0; n < N; ++n)
        if (!out.dac.fast(n).expr)
            out.dac.fast(n).expr = FastExpr<T>::zero();
    return out;
}

template <class T>
std::vector<double> canard_moments(const TriJet<T> &P, int p, int N, const QuadConfig &cfg) {
    if (p % 2 != 0)
        throw domain_error("canard_moments: even p required");
    using E = FastExpr<T>;
    int ydeg = 0, edeg = 0, xdeg = (int)P.size() - 1;
    for (const auto &py : P) {
        ydeg = std::max(ydeg, (int)py.size() - 1);
        for (const auto &pe : py)
            edeg = std::max(edeg, (int)pe.size() - 1);
    }
    std::vector<E> Y((size_t)N + 1, E::zero());
    std::vector<double> moments;
    double S = std::pow(45.0, 1.0 / p) + 2.0;
    for (int n = 1; n <= N; ++n) {
        std::vector<std::vector<E>> Ypow((size_t)ydeg + 1,
                                         std::vector<E>((size_t)N + 1, E::zero()));
        Ypow[0][0] = E::monomial(0);
        for (int m = 1; m <= ydeg; ++m)
            for (int q = m; q < n; ++q) {
                std::vector<E> terms;
                for (int nu = 1; nu <= q - (m - 1); ++nu)
                    if (!Ypow[(size_t)m - 1][(size_t)(q - nu)].is_zero() &&
                        !Y[(size_t)nu].is_zero())
                        terms.push_back(
                            E::product({Ypow[(size_t)m - 1][(size_t)(q - nu)], Y[(size_t)nu]}));
                Ypow[(size_t)m][(size_t)q] = E::sum(std::move(terms));
            }
        std::vector<E> gterms;
        for (int j = 0; j <= xdeg; ++j)
            for (int m = 0; m <= ydeg && m < (int)P[(size_t)j].size(); ++m)
                for (int l = 0; l <= edeg && l < (int)P[(size_t)j][(size_t)m].size(); ++l) {
                    int q = n - 1 - j - p * l;
                    if (q < 0 || (m == 0 && q != 0) || (m > 0 && q < m))
                        continue;
                    const T &coef = P[(size_t)j][(size_t)m][(size_t)l];
                    if (scalar_is_zero(coef))
                        continue;
                    E ym = m == 0 ? E::monomial(0) : Ypow[(size_t)m][(size_t)q];
                    if (ym.is_zero())
                        continue;
                    gterms.push_back(
                        E::scale(coef, j == 0 ? ym : E::product({E::monomial(j), ym})));
                }
        E Gn = E::sum(std::move(gterms));
        if (Gn.is_zero()) {
            moments.push_back(0.0);
            Y[(size_t)n] = E::zero();
            continue;
        }
        auto f = [&](double s) {
            return std::exp(-std::pow(s, (double)p)) * Gn.eval(s, cfg);
        };
        double I = integrate_gk(f, -S, S, std::max(cfg.abs_tol, 1e-10), cfg.max_depth);
        if (std::isnan(I) || std::isinf(I))
            throw domain_error("canard_moments: divergent moment integral");
        moments.push_back(I);
        Y[(size_t)n] = E::j_node(+1, p, Gn);
    }
    return moments;
}

} // namespace dacx
