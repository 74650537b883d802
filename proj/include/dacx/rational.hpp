#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dacx {

// Arbitrary-precision signed integer, base 2^32 little-endian magnitude.
// Only what exact rational series arithmetic needs: + - * divmod gcd compare.
class BigInt {
  public:
    BigInt() = default;
    BigInt(long long v);

    static BigInt from_string(const std::string &s);
    std::string to_string() const;

    bool is_zero() const { return mag_.empty(); }
    int sign() const { return mag_.empty() ? 0 : neg_ ? -1 : 1; }
    bool fits_int64() const;
    long long to_int64() const; // valid only if fits_int64()
    double to_double() const;

    BigInt operator-() const;
    BigInt abs() const;

    friend BigInt operator+(const BigInt &a, const BigInt &b);
    friend BigInt operator-(const BigInt &a, const BigInt &b);
    friend BigInt operator*(const BigInt &a, const BigInt &b);
    // Truncated toward zero; remainder has the sign of the dividend.
    static void divmod(const BigInt &a, const BigInt &b, BigInt &q, BigInt &r);
    friend BigInt operator/(const BigInt &a, const BigInt &b);
    friend BigInt operator%(const BigInt &a, const BigInt &b);

    friend bool operator==(const BigInt &a, const BigInt &b);
    friend bool operator<(const BigInt &a, const BigInt &b);
    friend bool operator!=(const BigInt &a, const BigInt &b) { return !(a == b); }
    friend bool operator>(const BigInt &a, const BigInt &b) { return b < a; }
    friend bool operator<=(const BigInt &a, const BigInt &b) { return !(b < a); }
    friend bool operator>=(const BigInt &a, const BigInt &b) { return !(a < b); }

    static BigInt gcd(BigInt a, BigInt b);

  private:
    bool neg_ = false;
    std::vector<uint32_t> mag_; // trimmed: no leading zero limbs

    void trim();
    static int cmp_mag(const BigInt &a, const BigInt &b);
    static std::vector<uint32_t> add_mag(const std::vector<uint32_t> &a,
                                         const std::vector<uint32_t> &b);
    // requires |a| >= |b|
    static std::vector<uint32_t> sub_mag(const std::vector<uint32_t> &a,
                                         const std::vector<uint32_t> &b);
};

// Exact rational number, always normalized (gcd 1, positive denominator).
class Rational {
  public:
    Rational() : num_(0), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}
    Rational(long long n, long long d);
    Rational(BigInt n, BigInt d);

    static Rational from_string(const std::string &s); // "p" or "p/q"
    std::string to_string() const;

    const BigInt &num() const { return num_; }
    const BigInt &den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    int sign() const { return num_.sign(); }
    double to_double() const;

    Rational operator-() const;
    friend Rational operator+(const Rational &a, const Rational &b);
    friend Rational operator-(const Rational &a, const Rational &b);
    friend Rational operator*(const Rational &a, const Rational &b);
    friend Rational operator/(const Rational &a, const Rational &b);
    Rational &operator+=(const Rational &b) { return *this = *this + b; }
    Rational &operator-=(const Rational &b) { return *this = *this - b; }
    Rational &operator*=(const Rational &b) { return *this = *this * b; }
    Rational &operator/=(const Rational &b) { return *this = *this / b; }

    friend bool operator==(const Rational &a, const Rational &b);
    friend bool operator!=(const Rational &a, const Rational &b) { return !(a == b); }
    friend bool operator<(const Rational &a, const Rational &b);
    friend bool operator>(const Rational &a, const Rational &b) { return b < a; }
    friend bool operator<=(const Rational &a, const Rational &b) { return !(b < a); }
    friend bool operator>=(const Rational &a, const Rational &b) { return !(a < b); }

  private:
    BigInt num_, den_;
    void normalize();
};

std::ostream &operator<<(std::ostream &os, const Rational &r);

} // namespace dacx
