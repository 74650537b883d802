#include "doctest.h"

#include <cmath>

#include "dacx/combined.hpp"
#include "dacx/problem.hpp"
#include "dacx/rational.hpp"
#include "random_series.hpp"

using namespace dacx;
using Q = Rational;
using CQ = CombinedSeries<Q>;
using testutil::Lcg;
using testutil::random_series;

namespace {

// equality of the reliable slots only (level n good to order M - loss*n)
bool equal_within_effective(const CQ &a, const CQ &b) {
    int N = std::min(a.eta_order(), b.eta_order());
    for (int n = 0; n < N; ++n) {
        int Ms = std::min(a.effective_slow_order(n), b.effective_slow_order(n));
        int Mf = std::min(a.effective_fast_order(n), b.effective_fast_order(n));
        for (int m = 0; m < Ms; ++m)
            if (!(a.slow(n).c[(size_t)m] == b.slow(n).c[(size_t)m]))
                return false;
        for (int m = 1; m <= Mf; ++m)
            if (!(a.fast(n).tail.coeff(m) == b.fast(n).tail.coeff(m)))
                return false;
    }
    return true;
}

CQ one_series(int p, int N, int M) {
    CQ r(p, N, M, M);
    r.slow(0).c[0] = Q(1);
    return r;
}

} // namespace

TEST_SUITE_BEGIN("combined");

TEST_CASE("valuation and distance definitions") {
    CQ y(1, 5, 3, 3);
    y.slow(2).c[1] = Q(7);
    CHECK(valuation(y) == 2);
    CQ z(1, 5, 3, 3);
    CHECK(distance(y, z) == doctest::Approx(0.25));
    CHECK(distance(y, y) == doctest::Approx(std::pow(2.0, -5))); // equal within truncation
}

TEST_CASE("ultrametric strong triangle inequality on random triples") {
    Lcg rng(42);
    for (int it = 0; it < 300; ++it) {
        CQ a = random_series(rng, 1, 4, 3);
        CQ b = random_series(rng, 1, 4, 3);
        CQ c = random_series(rng, 1, 4, 3);
        CHECK(distance(a, c) <= std::max(distance(a, b), distance(b, c)) + 1e-15);
    }
}

TEST_CASE("mul reproduces the expansion of a(x) g(x/eta)") {
    // a = [a0, a1], g = [g1]: level-0 fast a0*g, level-1 slow [g1*a1], level-1 fast 0
    Q a0(2), a1(5), g1(7);
    CQ A(1, 3, 2, 2), G(1, 3, 2, 2);
    A.slow(0).c = {a0, a1};
    G.fast(0).tail.c = {g1, Q(0)};
    CQ P = mul(A, G);
    CHECK(P.fast(0).tail.coeff(1) == a0 * g1);
    CHECK(P.slow(0).is_zero());
    CHECK(P.slow(1).c[0] == g1 * a1);
    CHECK(P.fast(1).tail.is_zero()); // T g = 0 for a one-slot tail
}

TEST_CASE("mul rejects fast coefficients with polynomial parts") {
    CQ a = one_series(1, 3, 3), b = one_series(1, 3, 3);
    b.fast(1).poly = {Q(0), Q(2)}; // polynomial growth is inner-sequence only
    CHECK_THROWS_AS(mul(a, b), domain_error);
}

TEST_CASE("mul identity, commutativity, associativity up to truncation") {
    Lcg rng(7);
    for (int it = 0; it < 200; ++it) {
        CQ a = random_series(rng, 2, 4, 4);
        CQ b = random_series(rng, 2, 4, 4);
        CQ c = random_series(rng, 2, 4, 4);
        CQ e = one_series(2, 4, 4);
        CHECK(equal_within_effective(mul(a, e), a));
        CQ ab = mul(a, b), ba = mul(b, a);
        CHECK(equal_within_effective(ab, ba));
        CHECK(equal_within_effective(mul(ab, c), mul(a, mul(b, c))));
    }
}

TEST_CASE("valuation is superadditive under mul") {
    Lcg rng(11);
    for (int it = 0; it < 200; ++it) {
        CQ a = random_series(rng, 1, 5, 3);
        CQ b = random_series(rng, 1, 5, 3);
        a = shift_up(a, rng.range(0, 2));
        b = shift_up(b, rng.range(0, 2));
        int va = valuation(a), vb = valuation(b), vab = valuation(mul(a, b));
        CHECK(vab >= std::min(va + vb, 5));
    }
}

TEST_CASE("mul against direct evaluation of (x+2) U^-(x/eta)") {
    QuadConfig cfg;
    double x = -0.5;
    auto exact = [&](double eta) { return (x + 2) * u_eval(2, 1, -1, x / eta, cfg); };
    // with evaluable fast parts the product representation is exact here
    int N = 4, M = 10;
    CQ A(1, N, M, M);
    A.slow(0).c[0] = Q(2);
    A.slow(0).c[1] = Q(1);
    CQ G(1, N, M, M);
    G.fast(0).tail = u_tail<Q>(2, 1, -1, M);
    G.fast(0).expr = FastExpr<Q>::special_u(2, 1, -1);
    CQ P = mul(A, G);
    for (double eta : {0.2, 0.1})
        CHECK(std::abs(P.eval_partial(x, eta, N, cfg) - exact(eta)) < 1e-9);
    // tails-only representation: the truncation error scales like a power of eta
    int Mt = 3;
    CQ At(1, N, Mt, Mt);
    At.slow(0).c[0] = Q(2);
    At.slow(0).c[1] = Q(1);
    CQ Gt(1, N, Mt, Mt);
    Gt.fast(0).tail = u_tail<Q>(2, 1, -1, Mt);
    CQ Pt = mul(At, Gt);
    double e1 = std::abs(Pt.eval_partial(x, 0.2, N, cfg) - exact(0.2));
    double e2 = std::abs(Pt.eval_partial(x, 0.1, N, cfg) - exact(0.1));
    CHECK(e1 < 0.05);
    CHECK(e1 / e2 > std::pow(2.0, 3.5)); // at least eta^4
}

TEST_CASE("differentiate: slow-only series differentiates termwise") {
    CQ y(1, 3, 4, 4);
    y.slow(0).c = {Q(1), Q(2), Q(3), Q(4)};
    y.slow(2).c = {Q(0), Q(1), Q(0), Q(0)};
    CQ d = differentiate(y);
    CHECK(d.slow(0).c == std::vector<Q>{Q(2), Q(6), Q(12)});
    CHECK(d.slow(2).c == std::vector<Q>{Q(1), Q(0), Q(0)});
}

TEST_CASE("differentiate: tail rule (g')_{m+1} = -m g_m") {
    CQ y(1, 3, 2, 2);
    Q g1(3), g2(5);
    y.fast(1).tail.c = {g1, g2};
    CQ d = differentiate(y);
    CHECK(d.fast(0).tail.coeff(1) == Q(0));
    CHECK(d.fast(0).tail.coeff(2) == -g1);
    CHECK(d.fast(0).tail.coeff(3) == Q(-2) * g2);
}

TEST_CASE("differentiate requires a vanishing level-0 fast part") {
    CQ y(1, 2, 2, 2);
    y.fast(0).tail.c[0] = Q(1);
    CHECK_THROWS_AS(differentiate(y), domain_error);
}

TEST_CASE("integrate: slow-only series gets the plain antiderivative") {
    CQ y(1, 2, 3, 3);
    y.slow(0).c = {Q(2), Q(4), Q(0)};
    auto Y = integrate(y, Q(0));
    CHECK(Y.log_free());
    CHECK(Y.base_series.slow(0).c[0] == Q(0));
    CHECK(Y.base_series.slow(0).c[1] == Q(2));
    CHECK(Y.base_series.slow(0).c[2] == Q(2));
}

TEST_CASE("integrate: residue-free tail antidifferentiates termwise") {
    CQ y(1, 3, 2, 4);
    Q g2(5);
    y.fast(0).tail.c = {Q(0), g2, Q(0), Q(0)};
    auto Y = integrate(y, Q(1));
    CHECK(Y.log_free());
    // G(X) = -int_X^inf g2 T^{-2} dT = -g2/X, landing at the next eta level
    CHECK(Y.base_series.fast(1).tail.coeff(1) == -g2);
}

TEST_CASE("integrate records residues and the log payload") {
    CQ y(2, 3, 2, 3);
    y.fast(1).tail.c[0] = Q(1); // g_{1,1} = 1
    auto Y = integrate(y, Q(1));
    CHECK(!Y.log_free());
    CHECK(Y.residues[1] == Q(1));
    CHECK(Y.residues[0] == Q(0));
    CHECK_THROWS_AS(Y.as_plain(), domain_error);
}

TEST_CASE("differentiate after integrate is the identity on residue-free series") {
    Lcg rng(23);
    for (int it = 0; it < 200; ++it) {
        CQ y = random_series(rng, 1, 4, 4);
        for (int n = 0; n < y.eta_order(); ++n)
            y.fast(n).tail.c[0] = Q(0); // clear residues
        auto Y = integrate(y, Q(0));
        REQUIRE(Y.log_free());
        CQ back = differentiate(Y.as_plain());
        int N = back.eta_order();
        for (int n = 0; n < N; ++n) {
            for (int m = 0; m < std::min(back.slow_order(), y.slow_order()); ++m)
                CHECK(back.slow(n).c[(size_t)m] == y.slow(n).c[(size_t)m]);
            for (int m = 1; m <= std::min(back.fast_order(), y.fast_order()) - 1; ++m)
                CHECK(back.fast(n).tail.coeff(m) == y.fast(n).tail.coeff(m));
        }
    }
}

TEST_CASE("compose_left: identity and square") {
    Lcg rng(31);
    CQ y = random_series(rng, 1, 4, 3);
    y.slow(0) = SlowSeries<Q>::zero(3);
    y.fast(0) = FastCoefficient<Q>::zero(3); // valuation >= 1
    CompositionSeries<Q> Pid;
    CQ one = one_series(1, 4, 3);
    Pid.set(1, 0, one);
    CHECK(equal_within_effective(compose_left(Pid, y), y));
    CompositionSeries<Q> Psq;
    Psq.set(2, 0, one);
    CHECK(equal_within_effective(compose_left(Psq, y), mul(y, y)));
}

TEST_CASE("compose_left rejects valuation-0 arguments") {
    CQ y = one_series(1, 3, 2);
    CompositionSeries<Q> P;
    P.set(1, 0, one_series(1, 3, 2));
    CHECK_THROWS_AS(compose_left(P, y), domain_error);
}

TEST_CASE("compose_analytic of u^2 equals mul, including the level-0 split") {
    Lcg rng(37);
    for (int it = 0; it < 50; ++it) {
        CQ y = random_series(rng, 1, 3, 3);
        Q c = y.slow(0).c[0];
        std::vector<Q> f = {c * c, Q(2) * c, Q(1)}; // u^2 at c
        CHECK(equal_within_effective(compose_analytic(f, y), mul(y, y)));
    }
}

TEST_CASE("extract_outer/inner for a slow-only series") {
    CQ y(1, 3, 3, 3);
    y.slow(0).c = {Q(1), Q(2), Q(3)};
    y.slow(1).c = {Q(4), Q(5), Q(6)};
    auto outer = extract_outer(y);
    CHECK(outer.coeff(1, 0) == Q(4));
    CHECK(outer.coeff(1, -1) == Q(0));
    auto inner = extract_inner(y);
    CHECK(inner.rows[1].poly[0] == Q(4));
    CHECK(inner.rows[1].poly[1] == Q(2));
    CHECK(inner.rows[2].fast.tail.is_zero());
    CHECK(inner.rows[2].poly[2] == Q(3));
}

TEST_CASE("outer picks up the U tail poles: c_2 ~ -1/(2x), c_4 ~ 1/(4x^3)") {
    CQ y(1, 5, 5, 5);
    y.fast(1).tail = u_tail<Q>(2, 1, -1, 5);
    auto outer = extract_outer(y);
    CHECK(outer.coeff(2, -1) == Q(-1, 2));
    CHECK(outer.coeff(3, -2) == Q(0));
    CHECK(outer.coeff(4, -3) == Q(1, 4));
}

TEST_CASE("matching identity c_{nm} = z_{n+m,-m} on random series") {
    Lcg rng(53);
    for (int it = 0; it < 300; ++it) {
        CQ y = random_series(rng, 2, 4, 4);
        auto outer = extract_outer(y);
        auto inner = extract_inner(y);
        for (int n = 0; n < 4; ++n)
            for (int m = -n; m < 4; ++m) {
                if (n + m >= 4)
                    continue;
                CHECK(outer.coeff(n, m) == inner.coeff(n + m, -m));
            }
    }
}

TEST_CASE("match_reconstruct round-trips extract_outer/extract_inner") {
    Lcg rng(59);
    for (int it = 0; it < 200; ++it) {
        CQ y = random_series(rng, 2, 4, 4);
        CQ back = match_reconstruct(extract_outer(y), extract_inner(y), 2);
        for (int n = 0; n < 4; ++n) {
            CHECK(back.slow(n).c == y.slow(n).c);
            CHECK(back.fast(n).tail.c == y.fast(n).tail.c);
        }
    }
}

TEST_CASE("match_reconstruct flags a perturbed overlap with its (n,m)") {
    Lcg rng(61);
    CQ y = random_series(rng, 2, 4, 4);
    auto outer = extract_outer(y);
    auto inner = extract_inner(y);
    outer.set_coeff(2, 1, outer.coeff(2, 1) + Q(1));
    bool threw = false;
    try {
        match_reconstruct(outer, inner, 2);
    } catch (const match_error &e) {
        threw = true;
        CHECK(e.level() == 2);
        CHECK(e.power() == 1);
    }
    CHECK(threw);
}

TEST_CASE("double-mode matching uses the float tolerance") {
    CombinedSeries<double> y(2, 4, 4, 4);
    y.slow(0).c = {0.3, -1.2, 0.0, 0.7};
    y.fast(1).tail.c = {0.5, 0.25, 0.0, -0.1};
    auto outer = extract_outer(y);
    auto inner = extract_inner(y);
    outer.set_coeff(2, 1, outer.coeff(2, 1) + 1e-12); // below tolerance
    auto back = match_reconstruct(outer, inner, 2, 1e-10);
    CHECK(back.fast(1).tail.coeff(1) == doctest::Approx(0.5));
    outer.set_coeff(2, 1, outer.coeff(2, 1) + 1e-6); // above tolerance
    CHECK_THROWS_AS(match_reconstruct(outer, inner, 2, 1e-10), match_error);
}

TEST_CASE("pure-slow matching inputs give zero fast parts") {
    CQ y(1, 3, 3, 3);
    y.slow(0).c = {Q(1), Q(1), Q(0)};
    CQ back = match_reconstruct(extract_outer(y), extract_inner(y), 1);
    for (int n = 0; n < 3; ++n)
        CHECK(back.fast(n).tail.is_zero());
}

TEST_CASE("two_point_merge: zero right fast part reduces to the left DAC") {
    CQ left(1, 3, 3, 3), right(1, 3, 3, 3);
    for (int n = 0; n < 3; ++n) {
        left.slow(n) = SlowSeries<Q>::constant(Q(n + 1), 3);
        right.slow(n) = SlowSeries<Q>::constant(Q(n + 1), 3);
    }
    auto m = two_point_merge(left, 0.0, right, 1.0, 0.4, 0.6);
    for (int n = 0; n < 3; ++n)
        CHECK(m.c_left(n, 0.3) == doctest::Approx((double)(n + 1)));
}

TEST_CASE("two_point_merge tail subtraction at n=1") {
    // left slow a_1(x) = x, right fast h_0 tail = [1]: c_1(x) = a_1(x) - (d-x)^{-1}
    CQ left(1, 2, 3, 3), right(1, 2, 3, 3);
    double a = 0, d = 2;
    left.slow(1).c = {Q(0), Q(1), Q(0)};
    right.fast(0).tail.c[0] = Q(1);
    auto m = TwoPointExpansion<Q>{a, d, left, right};
    double x = 0.5;
    CHECK(m.c_left(1, x) == doctest::Approx(x - 1.0 / (d - x)));
}

TEST_CASE("two_point_merge rejects disagreeing slow parts") {
    CQ left(1, 1, 2, 2), right(1, 1, 2, 2);
    right.slow(0).c = {Q(5), Q(0)};
    CHECK_THROWS_AS(two_point_merge(left, 0.0, right, 1.0, 0.4, 0.6), domain_error);
}

TEST_CASE("two_point_merge composite contains both fast families") {
    CQ left(1, 1, 4, 4), right(1, 1, 4, 4);
    left.fast(0).tail.c[1] = Q(1);
    left.fast(0).expr = FastExpr<Q>::monomial(-2);
    right.fast(0).tail.c[2] = Q(3);
    right.fast(0).expr = FastExpr<Q>::scale(Q(3), FastExpr<Q>::monomial(-3));
    auto m = two_point_merge(left, 0.0, right, 1.0, 0.4, 0.6);
    double eta = 0.05;
    for (double x : {0.2, 0.5, 0.8}) {
        double U = x / eta, V = (1.0 - x) / eta;
        double want = std::pow(U, -2.0) + 3 * std::pow(V, -3.0);
        CHECK(m.eval_partial(x, eta, 1) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("rational expansions serialize losslessly, expressions included") {
    Lcg rng(71);
    CQ y = random_series(rng, 2, 3, 3);
    y.fast(1).expr = FastExpr<Q>::sum(
        {FastExpr<Q>::scale(Q(1, 3), FastExpr<Q>::special_u(2, 1, -1)),
         FastExpr<Q>::tshift(FastExpr<Q>::monomial(-2))});
    CQ back = expansion_from_json<Q>(expansion_to_json(y));
    CHECK(back.p() == y.p());
    for (int n = 0; n < 3; ++n) {
        CHECK(back.slow(n).c == y.slow(n).c);
        CHECK(back.fast(n).tail.c == y.fast(n).tail.c);
    }
    REQUIRE(back.fast(1).expr.has_value());
    auto t1 = expr_tail(*y.fast(1).expr, 5).first;
    auto t2 = expr_tail(*back.fast(1).expr, 5).first;
    CHECK(t1.c == t2.c);
    // mode mismatch is rejected
    CHECK_THROWS_AS(expansion_from_json<double>(expansion_to_json(y)), schema_error);
}

TEST_CASE("invert_classify: regular leading slow coefficient inverts directly") {
    CQ y(1, 3, 4, 4);
    y.slow(0).c = {Q(2), Q(1), Q(0), Q(0)}; // a_0 = 2 + x
    auto r = invert_classify(y);
    REQUIRE(r.support_ok);
    CHECK(r.k == 0);
    CHECK(r.l == 0);
    CHECK(r.k_reciprocal == 0);
    const auto &rec = *r.reciprocal;
    CHECK(rec.slow(0).c[0] == Q(1, 2));
    CHECK(rec.slow(0).c[1] == Q(-1, 4));
    CHECK(rec.slow(0).c[2] == Q(1, 8));
    CQ prod = mul(y, rec);
    CHECK(prod.slow(0).c[0] == Q(1));
    CHECK(prod.slow(0).c[1] == Q(0));
    CHECK(prod.fast(0).tail.is_zero());
}

TEST_CASE("invert_classify: a monomial eta factor shifts k") {
    CQ y(1, 4, 3, 3);
    y.slow(2).c = {Q(1), Q(1), Q(0)}; // y = eta^2 (1 + x)
    auto r = invert_classify(y);
    REQUIRE(r.support_ok);
    CHECK(r.first_level == 2);
    CHECK(r.inner_valuation == 0);
    CHECK(r.k == 2);
}

TEST_CASE("invert_classify: support violation is reported with its level") {
    CQ y(1, 3, 3, 3);
    y.fast(0).tail.c[2] = Q(1); // h_0 ~ X^{-3}: C(y) = (0,3)
    y.slow(2).c[0] = Q(1);      // h_2 gains a constant: val 0 < 3 - 2 = 1
    auto r = invert_classify(y);
    CHECK(!r.support_ok);
    CHECK(!r.degenerate);
    REQUIRE(r.violating_level.has_value());
    CHECK(*r.violating_level == 2);
}

TEST_CASE("invert_classify: all-zero series is degenerate") {
    CQ y(1, 3, 2, 2);
    auto r = invert_classify(y);
    CHECK(r.degenerate);
}

TEST_CASE("invert_classify: negative inner valuation, y = x case") {
    CQ y(1, 3, 4, 4);
    y.slow(0).c[1] = Q(1); // y = x: h_1 = X, so C(y) = (1, -1)
    auto r = invert_classify(y);
    REQUIRE(r.support_ok);
    CHECK(r.first_level == 1);
    CHECK(r.inner_valuation == -1);
    CHECK(r.k == 0);
    CHECK(r.l == -1);
    CHECK(r.k_reciprocal == 1); // eta/x = X^{-1} has the DAC
    const auto &rec = *r.reciprocal;
    CHECK(rec.fast(0).tail.coeff(1) == Q(1));
    for (int m = 2; m <= 3; ++m)
        CHECK(rec.fast(0).tail.coeff(m) == Q(0));
}

TEST_SUITE_END();
