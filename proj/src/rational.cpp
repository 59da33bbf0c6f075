#include "uspread/rational.hpp"

#include <cctype>
#include <limits>
#include <ostream>

namespace uspread {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

long long narrow(__int128 v, const char* what) {
    if (v > std::numeric_limits<long long>::max() || v < std::numeric_limits<long long>::min())
        throw ContractError(std::string("Rational overflow in ") + what);
    return static_cast<long long>(v);
}

} // namespace

Rational Rational::make(__int128 num, __int128 den) {
    if (den == 0) throw InputError("Rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    __int128 g = gcd128(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    Rational r;
    r.num_ = narrow(num, "normalize");
    r.den_ = narrow(den, "normalize");
    return r;
}

Rational::Rational(long long num, long long den) { *this = make(num, den); }

long long Rational::floor() const {
    long long q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
}

Rational Rational::frac() const { return *this - Rational(floor()); }

std::string Rational::to_string() const {
    std::string s = std::to_string(num_);
    if (den_ != 1) s += "/" + std::to_string(den_);
    return s;
}

Rational Rational::operator-() const {
    Rational r;
    r.num_ = narrow(-static_cast<__int128>(num_), "negate");
    r.den_ = den_;
    return r;
}

Rational& Rational::operator+=(const Rational& r) {
    __int128 num = static_cast<__int128>(num_) * r.den_ + static_cast<__int128>(r.num_) * den_;
    __int128 den = static_cast<__int128>(den_) * r.den_;
    *this = make(num, den);
    return *this;
}

Rational& Rational::operator-=(const Rational& r) { return *this += -r; }

Rational& Rational::operator*=(const Rational& r) {
    *this = make(static_cast<__int128>(num_) * r.num_, static_cast<__int128>(den_) * r.den_);
    return *this;
}

Rational& Rational::operator/=(const Rational& r) {
    if (r.num_ == 0) throw InputError("Rational: division by zero");
    *this = make(static_cast<__int128>(num_) * r.den_, static_cast<__int128>(den_) * r.num_);
    return *this;
}

bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
}

Rational Rational::parse(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw InputError("Rational: empty value");

    auto slash = s.find('/');
    if (slash != std::string::npos) {
        try {
            std::size_t pa = 0, pb = 0;
            long long a = std::stoll(s.substr(0, slash), &pa);
            long long b = std::stoll(s.substr(slash + 1), &pb);
            if (pa != slash || pb != s.size() - slash - 1)
                throw std::invalid_argument(s);
            return Rational(a, b);
        } catch (const InputError&) {
            throw;
        } catch (const std::exception&) {
            throw InputError("Rational: bad fraction '" + text + "'");
        }
    }

    std::size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';

    __int128 mantissa = 0;
    int frac_digits = 0;
    bool any_digit = false, in_frac = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            mantissa = mantissa * 10 + (c - '0');
            if (mantissa > static_cast<__int128>(1) << 100)
                throw InputError("Rational: too many digits in '" + text + "'");
            if (in_frac) ++frac_digits;
            any_digit = true;
        } else if (c == '.' && !in_frac) {
            in_frac = true;
        } else if ((c == 'e' || c == 'E') && any_digit) {
            break;
        } else {
            throw InputError("Rational: bad value '" + text + "'");
        }
    }
    if (!any_digit) throw InputError("Rational: bad value '" + text + "'");

    int exp10 = 0;
    if (i < s.size()) {  // exponent part
        try {
            std::size_t pos = 0;
            exp10 = std::stoi(s.substr(i + 1), &pos);
            if (pos != s.size() - i - 1) throw std::invalid_argument(s);
        } catch (const std::exception&) {
            throw InputError("Rational: bad exponent in '" + text + "'");
        }
    }

    int net = exp10 - frac_digits;
    if (net > 30 || net < -30) throw InputError("Rational: exponent out of range in '" + text + "'");
    __int128 num = neg ? -mantissa : mantissa;
    __int128 den = 1;
    for (int k = 0; k < net; ++k) num *= 10;
    for (int k = 0; k > net; --k) den *= 10;
    try {
        return make(num, den);
    } catch (const ContractError&) {
        throw InputError("Rational: value out of range '" + text + "'");
    }
}

std::ostream& operator<<(std::ostream& out, const Rational& r) { return out << r.to_string(); }

} // namespace uspread
