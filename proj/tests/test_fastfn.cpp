#include "doctest.h"

#include <cmath>
#include <functional>

#include "dacx/fastfn.hpp"
#include "dacx/rational.hpp"

using namespace dacx;
using Q = Rational;
using EQ = FastExpr<Q>;
using ED = FastExpr<double>;

namespace {

// Composite-Simpson oracle, independent of the library quadrature path.
double simpson(const std::function<double(double)> &f, double a, double b, int n) {
    double h = (b - a) / n, s = f(a) + f(b);
    for (int i = 1; i < n; ++i)
        s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// U_1^-(X) for p=2 in closed form via the standard library.
double u21_closed(double X) { return std::exp(X * X) * 0.5 * std::sqrt(M_PI) * std::erfc(-X); }

} // namespace

TEST_SUITE_BEGIN("fastfn");

TEST_CASE("u_tail p=2 j=1 matches the known alternating tail") {
    FastTail<Q> t = u_tail<Q>(2, 1, -1, 5);
    REQUIRE(t.order() == 5);
    CHECK(t.c[0] == Q(-1, 2));
    CHECK(t.c[1] == Q(0));
    CHECK(t.c[2] == Q(1, 4));
    CHECK(t.c[3] == Q(0));
    CHECK(t.c[4] == Q(-3, 8));
}

TEST_CASE("u_tail ray independence and p=4 leading term") {
    CHECK(u_tail<Q>(2, 1, +1, 5).c == u_tail<Q>(2, 1, -1, 5).c);
    FastTail<Q> t = u_tail<Q>(4, 1, -1, 4);
    CHECK(t.c[0] == Q(0));
    CHECK(t.c[1] == Q(0));
    CHECK(t.c[2] == Q(-1, 4));
    CHECK(t.c[3] == Q(0));
}

TEST_CASE("u_tail prefix stability under larger truncation") {
    auto a = u_tail<Q>(2, 1, -1, 8);
    auto b = u_tail<Q>(2, 1, -1, 40);
    for (int i = 0; i < 8; ++i)
        CHECK(a.c[(size_t)i] == b.c[(size_t)i]);
}

TEST_CASE("u_eval closed-form oracle for p=2") {
    QuadConfig cfg;
    CHECK(u_eval(2, 1, -1, 0.0, cfg) == doctest::Approx(std::sqrt(M_PI) / 2).epsilon(1e-13));
    for (double X : {-6.0, -3.0, -1.0, -0.3, 0.7, 1.5, 2.5})
        CHECK(u_eval(2, 1, -1, X, cfg) == doctest::Approx(u21_closed(X)).epsilon(1e-11));
}

TEST_CASE("u_eval tail branch agrees with the closed form far out") {
    QuadConfig cfg;
    double tail_v = u_eval(2, 1, -1, -10.0, cfg);
    CHECK(tail_v == doctest::Approx(u21_closed(-10.0)).epsilon(1e-11));
    CHECK(tail_v == doctest::Approx(0.05 - 2.5e-4).epsilon(1e-3));
    for (double X = -11.5; X < -7.0; X += 0.5)
        CHECK(u_eval(2, 1, -1, X, cfg) == doctest::Approx(u21_closed(X)).epsilon(1e-11));
}

TEST_CASE("u_eval decay at the ray") {
    CHECK(std::abs(u_eval(2, 1, -1, -40.0)) < 0.02);
    CHECK(std::abs(u_eval(4, 1, -1, -30.0)) < 1e-4);
}

TEST_CASE("reflection identity U^+(X) = -U^-(-X) for p=2, j=1") {
    QuadConfig cfg;
    for (double X = -4.0; X <= 4.0; X += 0.5)
        CHECK(std::abs(u_eval(2, 1, +1, X, cfg) + u_eval(2, 1, -1, -X, cfg)) < 1e-10);
}

TEST_CASE("ODE residual by central differences") {
    QuadConfig cfg;
    for (int p : {2, 4})
        for (int j = 1; j < p; ++j)
            for (double X : {-2.0, -0.8, 0.0, 0.9}) {
                double h = 1e-4;
                double du = (u_eval(p, j, -1, X + h, cfg) - u_eval(p, j, -1, X - h, cfg)) / (2 * h);
                double res = du - p * std::pow(X, p - 1) * u_eval(p, j, -1, X, cfg) -
                             std::pow(X, j - 1);
                CHECK(std::abs(res) < 1e-6);
            }
}

TEST_CASE("j_apply of a monomial coincides with the special function") {
    QuadConfig cfg;
    ED w = j_apply(-1, 2, ED::monomial(0), cfg);
    for (double X : {-3.0, -1.0, 0.0, 1.0})
        CHECK(w.eval(X, cfg) == doctest::Approx(u_eval(2, 1, -1, X, cfg)).epsilon(1e-11));
    ED w4 = j_apply(-1, 4, ED::monomial(2), cfg);
    for (double X : {-2.0, 0.5})
        CHECK(w4.eval(X, cfg) == doctest::Approx(u_eval(4, 3, -1, X, cfg)).epsilon(1e-11));
}

TEST_CASE("j_apply of zero is zero") {
    CHECK(j_apply(-1, 2, ED::zero()).is_zero());
}

TEST_CASE("j_apply rejects inputs that outgrow the kernel") {
    CHECK_THROWS_AS(j_apply(-1, 2, ED::exp_pow(+1, 2)), domain_error);
}

TEST_CASE("nested j_apply against a double-quadrature oracle") {
    QuadConfig cfg;
    ED u = ED::special_u(2, 1, -1);
    ED ju = j_apply(-1, 2, u, cfg);
    // oracle: int_{-inf}^{0} e^{-T^2} U^-(T) dT with U^- by erfc, Simpson rule
    auto f = [](double T) { return std::exp(-T * T) * u21_closed(T); };
    double oracle = simpson(f, -9.0, 0.0, 20000);
    CHECK(ju.eval(0.0, cfg) == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("j_apply tail satisfies the induced ODE termwise") {
    EQ w = EQ::j_node(-1, 2, EQ::monomial(-2));
    auto [tail, poly] = expr_tail(w, 6);
    CHECK(poly.empty());
    // W' = 2X W + X^{-2} termwise on the asymptotic series
    std::vector<Q> full(8, Q(0));
    for (int m = 1; m <= 6; ++m)
        full[(size_t)m] = tail.c[(size_t)m - 1];
    for (int s = 0; s <= 4; ++s) { // needs slot s+2, so stay within truncation
        Q lhs = s >= 1 ? Q(-s) * full[(size_t)s] : Q(0);
        Q rhs = Q(2) * full[(size_t)(s + 2)] + (s + 1 == 2 ? Q(1) : Q(0));
        CHECK(lhs == rhs);
    }
}

TEST_CASE("expr tail of X * U tracks the polynomial part") {
    EQ e = EQ::product({EQ::monomial(1), EQ::special_u(2, 1, -1)});
    auto [tail, poly] = expr_tail(e, 4);
    REQUIRE(poly.size() >= 1);
    CHECK(poly[0] == Q(-1, 2)); // X * (-1/(2X))
    CHECK(tail.c[0] == Q(0));
    CHECK(tail.c[1] == Q(1, 4));
    CHECK(tail.c[3] == Q(-3, 8));
}

TEST_CASE("sum with zero and scale evaluation") {
    QuadConfig cfg;
    ED u = ED::special_u(2, 1, -1);
    ED s = ED::sum({ED::zero(), u});
    CHECK(s.eval(-1.3, cfg) == doctest::Approx(u.eval(-1.3, cfg)));
    ED two_u = ED::scale(2.0, u);
    CHECK(two_u.eval(0.0, cfg) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
}

TEST_CASE("tail/eval agreement beyond the switch point") {
    QuadConfig cfg;
    for (int p : {2, 4}) {
        ED u = ED::special_u(p, 1, -1);
        auto tail = expr_tail(u, 12).first;
        auto longer = expr_tail(u, 13).first;
        for (double X : {-13.0, -16.0}) {
            double partial = tail.eval_partial(X);
            double omitted = std::abs(longer.c[12] * std::pow(X, -13.0));
            CHECK(std::abs(u.eval(X, cfg) - partial) <= omitted + 1e-13);
        }
    }
}

TEST_CASE("derivative node eval matches finite differences") {
    QuadConfig cfg;
    ED e = ED::product({ED::monomial(1), ED::special_u(2, 1, -1)});
    ED de = ED::derivative(e);
    for (double X : {-2.0, -0.5, 0.4}) {
        double h = 1e-5;
        double fd = (e.eval(X + h, cfg) - e.eval(X - h, cfg)) / (2 * h);
        CHECK(de.eval(X, cfg) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("tshift node: T f = X f - f_1") {
    QuadConfig cfg;
    ED u = ED::special_u(2, 1, -1);
    ED tu = ED::tshift(u);
    for (double X : {-3.0, -1.0})
        CHECK(tu.eval(X, cfg) == doctest::Approx(X * u.eval(X, cfg) + 0.5).epsilon(1e-11));
    auto [tail, poly] = expr_tail(EQ::tshift(EQ::special_u(2, 1, -1)), 3);
    CHECK(poly.empty());
    CHECK(tail.c[0] == Q(0));
    CHECK(tail.c[1] == Q(1, 4));
}

TEST_CASE("dawson node eval against a Simpson oracle") {
    QuadConfig cfg;
    ED d = ED::dawson(2);
    for (double X : {0.3, 1.0, 2.5, -1.7}) {
        auto f = [&](double t) { return std::exp(t * t - X * X); };
        double oracle = X >= 0 ? simpson(f, 0, X, 40000) : -simpson(f, -X, 0, 40000);
        if (X < 0) {
            auto g = [&](double t) { return std::exp(t * t - X * X); };
            oracle = simpson(g, 0, X, 40000);
        }
        CHECK(d.eval(X, cfg) == doctest::Approx(oracle).epsilon(1e-9));
    }
    auto [tail, poly] = expr_tail(EQ::dawson(2), 5);
    CHECK(poly.empty());
    CHECK(tail.c[0] == Q(1, 2));
    CHECK(tail.c[2] == Q(1, 4));
    CHECK(tail.c[4] == Q(3, 8));
}

TEST_CASE("odd p: only the + ray converges") {
    CHECK_THROWS_AS(u_eval(3, 1, -1, 0.0), domain_error);
    QuadConfig cfg;
    double v = u_eval(3, 1, +1, 1.0, cfg);
    auto f = [](double T) { return std::exp(1.0 - T * T * T); };
    CHECK(v == doctest::Approx(-simpson(f, 1.0, 12.0, 40000)).epsilon(1e-9));
}

TEST_CASE("exponentially large regime raises a domain error") {
    CHECK_THROWS_AS(u_eval(2, 1, -1, 40.0), domain_error);
}

TEST_SUITE_END();
