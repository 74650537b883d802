#include "doctest.h"

#include "dacx/rational.hpp"
#include "dacx/series.hpp"

using namespace dacx;
using Q = Rational;

TEST_SUITE_BEGIN("series");

TEST_CASE("slow shift drops the constant term") {
    SlowSeries<Q> a({Q(5), Q(2), Q(3)});
    auto s = slow_shift(a);
    CHECK(s.c == std::vector<Q>{Q(2), Q(3)});
    CHECK(slow_shift(SlowSeries<Q>({Q(7)})).order() == 0);
    SlowSeries<Q> b({Q(1), Q(2), Q(3), Q(4)});
    CHECK(slow_shift(b).c == std::vector<Q>{Q(2), Q(3), Q(4)});
}

TEST_CASE("fast shift drops the leading tail slot") {
    FastTail<Q> g({Q(1), Q(2), Q(3)});
    CHECK(fast_shift(g).c == std::vector<Q>{Q(2), Q(3)});
    CHECK(fast_shift(FastTail<Q>({Q(1)})).order() == 0);
    FastTail<Q> u({Q(-1, 2), Q(0), Q(1, 4)});
    CHECK(fast_shift(u).c == std::vector<Q>{Q(0), Q(1, 4)});
}

TEST_CASE("empty series raise domain errors") {
    CHECK_THROWS_AS(slow_shift(SlowSeries<Q>{}), domain_error);
    CHECK_THROWS_AS(fast_shift(FastTail<Q>{}), domain_error);
}

TEST_CASE("x S(a) + a(0) reproduces a up to truncation") {
    SlowSeries<Q> a({Q(3), Q(-1, 2), Q(7), Q(2, 3)});
    auto s = slow_shift(a);
    CHECK(a.c[0] == Q(3));
    for (int m = 1; m < a.order(); ++m)
        CHECK(a.c[(size_t)m] == s.c[(size_t)m - 1]);
}

TEST_CASE("X g - T(g) equals the constant g_1 at tail level") {
    FastTail<Q> g({Q(4), Q(-5), Q(9)});
    auto t = fast_shift(g);
    for (int m = 1; m < g.order(); ++m)
        CHECK(g.coeff(m + 1) == t.coeff(m));
}

TEST_CASE("taylor helpers") {
    std::vector<Q> a{Q(1), Q(2)}, b{Q(3), Q(0), Q(1)};
    CHECK(taylor_mul(a, b, 4) == std::vector<Q>{Q(3), Q(6), Q(1), Q(2)});
    CHECK(taylor_derivative(b) == std::vector<Q>{Q(0), Q(2)});
    CHECK(taylor_antiderivative(a) == std::vector<Q>{Q(0), Q(1), Q(1)});
}

TEST_SUITE_END();
