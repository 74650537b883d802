#include "doctest.h"

#include <cstdlib>

#include "dacx/rational.hpp"

using dacx::BigInt;
using dacx::Rational;

TEST_SUITE_BEGIN("rational");

TEST_CASE("bigint small arithmetic matches int64") {
    srand(1234);
    for (int iter = 0; iter < 4000; ++iter) {
        long long a = (long long)(rand() % 200001) - 100000;
        long long b = (long long)(rand() % 200001) - 100000;
        CHECK(BigInt(a) + BigInt(b) == BigInt(a + b));
        CHECK(BigInt(a) - BigInt(b) == BigInt(a - b));
        CHECK(BigInt(a) * BigInt(b) == BigInt(a * b));
        if (b != 0) {
            CHECK(BigInt(a) / BigInt(b) == BigInt(a / b));
            CHECK(BigInt(a) % BigInt(b) == BigInt(a % b));
        }
    }
}

TEST_CASE("bigint divmod identity on large operands") {
    srand(99);
    BigInt a(1);
    for (int i = 0; i < 12; ++i)
        a = a * BigInt(1000000007LL) + BigInt(rand());
    BigInt b(1);
    for (int i = 0; i < 5; ++i)
        b = b * BigInt(998244353LL) + BigInt(rand());
    for (int sa = -1; sa <= 1; sa += 2)
        for (int sb = -1; sb <= 1; sb += 2) {
            BigInt aa = sa < 0 ? -a : a, bb = sb < 0 ? -b : b;
            BigInt q, r;
            BigInt::divmod(aa, bb, q, r);
            CHECK(q * bb + r == aa);
            CHECK(r.abs() < bb.abs());
        }
}

TEST_CASE("bigint decimal round trip") {
    BigInt v = BigInt::from_string("-123456789012345678901234567890123456789");
    CHECK(v.to_string() == "-123456789012345678901234567890123456789");
    CHECK((v * v).sign() == 1);
    CHECK(BigInt::from_string("0").to_string() == "0");
}

TEST_CASE("rational normalization and field laws") {
    Rational a(6, -4);
    CHECK(a.to_string() == "-3/2");
    Rational b(7, 3), c(-2, 9);
    CHECK((a + b) - b == a);
    CHECK(a * b / b == a);
    CHECK((a + b) * c == a * c + b * c);
    CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
    CHECK(Rational::from_string("-3/9") == Rational(-1, 3));
    CHECK(Rational(1, 3).to_double() == doctest::Approx(1.0 / 3).epsilon(1e-15));
}

TEST_CASE("rational comparisons") {
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(Rational(-1, 2) < Rational(-1, 3));
    CHECK(Rational(0) < Rational(1, 1000000));
}

TEST_SUITE_END();
