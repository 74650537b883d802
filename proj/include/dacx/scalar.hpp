#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "dacx/rational.hpp"

namespace dacx {

// Uniform access to the two coefficient modes: exact rationals for the
// recurrences and algebra laws, doubles for evaluation paths.
template <class T> struct scalar_traits;

template <> struct scalar_traits<double> {
    static constexpr bool exact = false;
    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static double from_int(long long v) { return (double)v; }
    static double from_ratio(long long n, long long d) { return (double)n / (double)d; }
    static bool is_zero(double v) { return v == 0.0; }
    static double to_double(double v) { return v; }
    static std::string to_string(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }
};

template <> struct scalar_traits<Rational> {
    static constexpr bool exact = true;
    static Rational zero() { return Rational(0); }
    static Rational one() { return Rational(1); }
    static Rational from_int(long long v) { return Rational(v); }
    static Rational from_ratio(long long n, long long d) { return Rational(n, d); }
    static bool is_zero(const Rational &v) { return v.is_zero(); }
    static double to_double(const Rational &v) { return v.to_double(); }
    static std::string to_string(const Rational &v) { return v.to_string(); }
};

template <class T> bool scalar_is_zero(const T &v) { return scalar_traits<T>::is_zero(v); }
template <class T> double scalar_to_double(const T &v) { return scalar_traits<T>::to_double(v); }

} // namespace dacx
