#include "dacx/rational.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace dacx {

BigInt::BigInt(long long v) {
    neg_ = v < 0;
    unsigned long long u = neg_ ? 0ULL - (unsigned long long)v : (unsigned long long)v;
    while (u) {
        mag_.push_back((uint32_t)(u & 0xffffffffULL));
        u >>= 32;
    }
}

void BigInt::trim() {
    while (!mag_.empty() && mag_.back() == 0)
        mag_.pop_back();
    if (mag_.empty())
        neg_ = false;
}

int BigInt::cmp_mag(const BigInt &a, const BigInt &b) {
    if (a.mag_.size() != b.mag_.size())
        return a.mag_.size() < b.mag_.size() ? -1 : 1;
    for (size_t i = a.mag_.size(); i-- > 0;)
        if (a.mag_[i] != b.mag_[i])
            return a.mag_[i] < b.mag_[i] ? -1 : 1;
    return 0;
}

std::vector<uint32_t> BigInt::add_mag(const std::vector<uint32_t> &a,
                                      const std::vector<uint32_t> &b) {
    const std::vector<uint32_t> &hi = a.size() >= b.size() ? a : b;
    const std::vector<uint32_t> &lo = a.size() >= b.size() ? b : a;
    std::vector<uint32_t> r(hi.size() + 1, 0);
    uint64_t carry = 0;
    for (size_t i = 0; i < hi.size(); ++i) {
        uint64_t s = carry + hi[i] + (i < lo.size() ? lo[i] : 0);
        r[i] = (uint32_t)s;
        carry = s >> 32;
    }
    r[hi.size()] = (uint32_t)carry;
    while (!r.empty() && r.back() == 0)
        r.pop_back();
    return r;
}

std::vector<uint32_t> BigInt::sub_mag(const std::vector<uint32_t> &a,
                                      const std::vector<uint32_t> &b) {
    std::vector<uint32_t> r(a.size(), 0);
    int64_t borrow = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        int64_t d = (int64_t)a[i] - borrow - (i < b.size() ? (int64_t)b[i] : 0);
        if (d < 0) {
            d += (int64_t)1 << 32;
            borrow = 1;
        } else {
            borrow = 0;
        }
        r[i] = (uint32_t)d;
    }
    while (!r.empty() && r.back() == 0)
        r.pop_back();
    return r;
}

BigInt operator+(const BigInt &a, const BigInt &b) {
    BigInt r;
    if (a.neg_ == b.neg_) {
        r.mag_ = BigInt::add_mag(a.mag_, b.mag_);
        r.neg_ = a.neg_;
    } else {
        int c = BigInt::cmp_mag(a, b);
        if (c == 0)
            return BigInt();
        if (c > 0) {
            r.mag_ = BigInt::sub_mag(a.mag_, b.mag_);
            r.neg_ = a.neg_;
        } else {
            r.mag_ = BigInt::sub_mag(b.mag_, a.mag_);
            r.neg_ = b.neg_;
        }
    }
    r.trim();
    return r;
}

BigInt BigInt::operator-() const {
    BigInt r = *this;
    if (!r.mag_.empty())
        r.neg_ = !r.neg_;
    return r;
}

BigInt BigInt::abs() const {
    BigInt r = *this;
    r.neg_ = false;
    return r;
}

BigInt operator-(const BigInt &a, const BigInt &b) { return a + (-b); }

BigInt operator*(const BigInt &a, const BigInt &b) {
    if (a.is_zero() || b.is_zero())
        return BigInt();
    BigInt r;
    r.mag_.assign(a.mag_.size() + b.mag_.size(), 0);
    for (size_t i = 0; i < a.mag_.size(); ++i) {
        uint64_t carry = 0;
        for (size_t j = 0; j < b.mag_.size(); ++j) {
            uint64_t cur = r.mag_[i + j] + (uint64_t)a.mag_[i] * b.mag_[j] + carry;
            r.mag_[i + j] = (uint32_t)cur;
            carry = cur >> 32;
        }
        size_t k = i + b.mag_.size();
        while (carry) {
            uint64_t cur = r.mag_[k] + carry;
            r.mag_[k] = (uint32_t)cur;
            carry = cur >> 32;
            ++k;
        }
    }
    r.neg_ = a.neg_ != b.neg_;
    r.trim();
    return r;
}

// Knuth algorithm D on 32-bit limbs.
void BigInt::divmod(const BigInt &a, const BigInt &b, BigInt &q, BigInt &r) {
    if (b.is_zero())
        throw std::domain_error("BigInt: division by zero");
    int c = cmp_mag(a, b);
    if (c < 0) {
        q = BigInt();
        r = a;
        return;
    }
    if (b.mag_.size() == 1) {
        uint64_t d = b.mag_[0], rem = 0;
        q.mag_.assign(a.mag_.size(), 0);
        for (size_t i = a.mag_.size(); i-- > 0;) {
            uint64_t cur = (rem << 32) | a.mag_[i];
            q.mag_[i] = (uint32_t)(cur / d);
            rem = cur % d;
        }
        q.neg_ = a.neg_ != b.neg_;
        q.trim();
        r = BigInt((long long)rem);
        r.neg_ = !r.mag_.empty() && a.neg_;
        return;
    }

    // Normalize so the divisor's top limb has its high bit set.
    int shift = 0;
    for (uint32_t top = b.mag_.back(); !(top & 0x80000000u); top <<= 1)
        ++shift;
    size_t n = b.mag_.size(), m = a.mag_.size() - n;
    std::vector<uint32_t> u(a.mag_.size() + 1, 0), v(n, 0);
    for (size_t i = a.mag_.size(); i-- > 0;) {
        u[i] |= (uint32_t)(((uint64_t)a.mag_[i] << shift) & 0xffffffffu);
        if (shift && i + 1 <= a.mag_.size())
            u[i + 1] |= (uint32_t)((uint64_t)a.mag_[i] >> (32 - shift));
    }
    for (size_t i = n; i-- > 0;) {
        v[i] = (uint32_t)(((uint64_t)b.mag_[i] << shift) & 0xffffffffu);
        if (shift && i + 1 < n)
            v[i + 1] |= (uint32_t)((uint64_t)b.mag_[i] >> (32 - shift));
    }

    q.mag_.assign(m + 1, 0);
    const uint64_t base = 1ULL << 32;
    for (size_t j = m + 1; j-- > 0;) {
        uint64_t num = ((uint64_t)u[j + n] << 32) | u[j + n - 1];
        uint64_t qhat = num / v[n - 1], rhat = num % v[n - 1];
        while (qhat >= base ||
               qhat * v[n - 2] > ((rhat << 32) | u[j + n - 2])) {
            --qhat;
            rhat += v[n - 1];
            if (rhat >= base)
                break;
        }
        // Multiply-subtract qhat*v from u[j..j+n].
        int64_t borrow = 0;
        uint64_t carry = 0;
        for (size_t i = 0; i < n; ++i) {
            uint64_t p = qhat * v[i] + carry;
            carry = p >> 32;
            int64_t t = (int64_t)u[i + j] - (int64_t)(p & 0xffffffffu) - borrow;
            if (t < 0) {
                t += base;
                borrow = 1;
            } else {
                borrow = 0;
            }
            u[i + j] = (uint32_t)t;
        }
        int64_t t = (int64_t)u[j + n] - (int64_t)carry - borrow;
        if (t < 0) { // qhat was one too large
            t += base;
            --qhat;
            uint64_t c2 = 0;
            for (size_t i = 0; i < n; ++i) {
                uint64_t s = (uint64_t)u[i + j] + v[i] + c2;
                u[i + j] = (uint32_t)s;
                c2 = s >> 32;
            }
            t += (int64_t)c2;
        }
        u[j + n] = (uint32_t)t;
        q.mag_[j] = (uint32_t)qhat;
    }

    r.mag_.assign(n, 0);
    for (size_t i = 0; i < n; ++i) {
        r.mag_[i] = u[i] >> shift;
        if (shift && i + 1 < u.size())
            r.mag_[i] |= (uint32_t)((uint64_t)u[i + 1] << (32 - shift));
    }
    q.neg_ = a.neg_ != b.neg_;
    r.neg_ = a.neg_;
    q.trim();
    r.trim();
}

BigInt operator/(const BigInt &a, const BigInt &b) {
    BigInt q, r;
    BigInt::divmod(a, b, q, r);
    return q;
}

BigInt operator%(const BigInt &a, const BigInt &b) {
    BigInt q, r;
    BigInt::divmod(a, b, q, r);
    return r;
}

bool operator==(const BigInt &a, const BigInt &b) {
    return a.neg_ == b.neg_ && a.mag_ == b.mag_;
}

bool operator<(const BigInt &a, const BigInt &b) {
    if (a.neg_ != b.neg_)
        return a.neg_;
    int c = BigInt::cmp_mag(a, b);
    return a.neg_ ? c > 0 : c < 0;
}

BigInt BigInt::gcd(BigInt a, BigInt b) {
    a.neg_ = b.neg_ = false;
    while (!b.is_zero()) {
        BigInt q, r;
        divmod(a, b, q, r);
        a = b;
        b = r;
    }
    return a;
}

bool BigInt::fits_int64() const {
    if (mag_.size() > 2)
        return false;
    if (mag_.size() < 2)
        return true;
    uint64_t v = ((uint64_t)mag_[1] << 32) | mag_[0];
    return neg_ ? v <= (1ULL << 63) : v < (1ULL << 63);
}

long long BigInt::to_int64() const {
    uint64_t v = 0;
    if (mag_.size() > 0)
        v |= mag_[0];
    if (mag_.size() > 1)
        v |= (uint64_t)mag_[1] << 32;
    return neg_ ? -(long long)v : (long long)v;
}

double BigInt::to_double() const {
    double v = 0;
    for (size_t i = mag_.size(); i-- > 0;)
        v = v * 4294967296.0 + mag_[i];
    return neg_ ? -v : v;
}

BigInt BigInt::from_string(const std::string &s) {
    BigInt r;
    size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-'))
        neg = s[i++] == '-';
    if (i == s.size())
        throw std::invalid_argument("BigInt: empty literal");
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9')
            throw std::invalid_argument("BigInt: bad digit in literal");
        r = r * BigInt(10) + BigInt(s[i] - '0');
    }
    r.neg_ = neg && !r.is_zero();
    return r;
}

std::string BigInt::to_string() const {
    if (is_zero())
        return "0";
    BigInt t = abs();
    std::string digits;
    BigInt ten(10), q, r;
    while (!t.is_zero()) {
        divmod(t, ten, q, r);
        digits.push_back((char)('0' + (r.is_zero() ? 0 : r.to_int64())));
        t = q;
    }
    if (neg_)
        digits.push_back('-');
    return std::string(digits.rbegin(), digits.rend());
}

Rational::Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }
Rational::Rational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }

void Rational::normalize() {
    if (den_.is_zero())
        throw std::domain_error("Rational: zero denominator");
    if (den_.sign() < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    if (num_.is_zero()) {
        den_ = BigInt(1);
        return;
    }
    BigInt g = BigInt::gcd(num_, den_);
    num_ = num_ / g;
    den_ = den_ / g;
}

Rational Rational::operator-() const {
    Rational r = *this;
    r.num_ = -r.num_;
    return r;
}

Rational operator+(const Rational &a, const Rational &b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}
Rational operator-(const Rational &a, const Rational &b) {
    return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}
Rational operator*(const Rational &a, const Rational &b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_);
}
Rational operator/(const Rational &a, const Rational &b) {
    if (b.is_zero())
        throw std::domain_error("Rational: division by zero");
    return Rational(a.num_ * b.den_, a.den_ * b.num_);
}

bool operator==(const Rational &a, const Rational &b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
}
bool operator<(const Rational &a, const Rational &b) {
    return a.num_ * b.den_ < b.num_ * a.den_;
}

double Rational::to_double() const { return num_.to_double() / den_.to_double(); }

Rational Rational::from_string(const std::string &s) {
    size_t slash = s.find('/');
    if (slash == std::string::npos)
        return Rational(BigInt::from_string(s), BigInt(1));
    return Rational(BigInt::from_string(s.substr(0, slash)),
                    BigInt::from_string(s.substr(slash + 1)));
}

std::string Rational::to_string() const {
    if (den_ == BigInt(1))
        return num_.to_string();
    return num_.to_string() + "/" + den_.to_string();
}

std::ostream &operator<<(std::ostream &os, const Rational &r) { return os << r.to_string(); }

} // namespace dacx
