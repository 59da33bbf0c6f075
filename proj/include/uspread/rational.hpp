#pragma once

#include <cstdint>
#include <iosfwd>
#include <numeric>
#include <string>

#include "uspread/common.hpp"

namespace uspread {

// Exact rational on int64 numerator/denominator, always normalized (den > 0,
// gcd(|num|, den) = 1). Intermediates run through __int128 and overflow past
// int64 throws, so results are exact or loud, never silently wrong.
class Rational {
public:
    Rational() = default;
    Rational(long long value) : num_(value), den_(1) {}  // NOLINT(google-explicit-constructor)
    Rational(long long num, long long den);

    long long num() const { return num_; }
    long long den() const { return den_; }

    bool is_integer() const { return den_ == 1; }
    bool is_zero() const { return num_ == 0; }

    // Integer part [x] (floor) and fractional part {x} = x - [x] in [0, 1).
    long long floor() const;
    Rational frac() const;

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string to_string() const;  // "n" or "n/d"

    Rational operator-() const;
    Rational& operator+=(const Rational& r);
    Rational& operator-=(const Rational& r);
    Rational& operator*=(const Rational& r);
    Rational& operator/=(const Rational& r);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b);
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    Rational abs() const { return num_ < 0 ? -*this : *this; }

    // Exact value of decimal text ("2.5", "-0.125", "3e-2") or a fraction
    // ("5/3"). Plain binary doubles are NOT read; values are taken at their
    // printed decimal meaning, so "0.1" is exactly 1/10.
    static Rational parse(const std::string& text);

private:
    static Rational make(__int128 num, __int128 den);

    long long num_ = 0;
    long long den_ = 1;
};

std::ostream& operator<<(std::ostream& out, const Rational& r);

inline Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

} // namespace uspread
