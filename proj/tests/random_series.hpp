#pragma once

#include <cstdint>

#include "dacx/combined.hpp"
#include "dacx/rational.hpp"

// Deterministic rational-series generator shared by the property tests and
// the acceptance suite.
namespace testutil {

struct Lcg {
    uint64_t s;
    explicit Lcg(uint64_t seed) : s(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
    uint64_t next() {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        return s >> 17;
    }
    int range(int lo, int hi) { return lo + (int)(next() % (uint64_t)(hi - lo + 1)); }
};

inline dacx::Rational rand_q(Lcg &rng) {
    return dacx::Rational(rng.range(-3, 3), rng.range(1, 3));
}

inline dacx::CombinedSeries<dacx::Rational> random_series(Lcg &rng, int p, int N, int M,
                                                          bool fast_zero_level0 = false) {
    dacx::CombinedSeries<dacx::Rational> y(p, N, M, M);
    for (int n = 0; n < N; ++n) {
        for (int m = 0; m < M; ++m)
            y.slow(n).c[(size_t)m] = rand_q(rng);
        if (n == 0 && fast_zero_level0)
            continue;
        for (int m = 0; m < M; ++m)
            y.fast(n).tail.c[(size_t)m] = rand_q(rng);
    }
    return y;
}

} // namespace testutil
