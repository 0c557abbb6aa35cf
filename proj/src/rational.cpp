#include "ergolab/rational.hpp"

#include <cctype>
#include <limits>
#include <numeric>

#include "ergolab/errors.hpp"

namespace ergolab {

namespace {

using i128 = __int128;

std::int64_t narrow(i128 v) {
    if (v > std::numeric_limits<std::int64_t>::max() || v < -std::numeric_limits<std::int64_t>::max())
        throw Overflow("rational", "exponent arithmetic overflowed 64 bits");
    return static_cast<std::int64_t>(v);
}

Rational make(i128 n, i128 d) {
    if (d == 0) throw DomainError("rational", "zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    i128 a = n < 0 ? -n : n, b = d;
    while (b != 0) {
        i128 r = a % b;
        a = b;
        b = r;
    }
    if (a > 1) {
        n /= a;
        d /= a;
    }
    return Rational(narrow(n), narrow(d));
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) throw DomainError("rational", "zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    std::int64_t g = std::gcd(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    num_ = n;
    den_ = d;
}

std::int64_t Rational::floor() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
}

std::int64_t Rational::ceil() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ > 0) ++q;
    return q;
}

Rational Rational::operator-() const { return Rational(-num_, den_); }

Rational operator+(const Rational& a, const Rational& b) {
    if (a.den_ == b.den_) return make(i128(a.num_) + b.num_, a.den_);
    return make(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
    return make(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw DomainError("rational", "division by zero");
    return make(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ <=> i128(b.num_) * a.den_;
}

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(std::string_view s) {
    auto fail = [&] { return ParseError("rational", "bad number '" + std::string(s) + "'"); };
    if (s.empty()) throw fail();
    bool neg = false;
    std::size_t i = 0;
    if (s[0] == '-' || s[0] == '+') {
        neg = s[0] == '-';
        ++i;
    }
    auto digits = [&](i128& out, std::size_t& count) {
        out = 0;
        count = 0;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
            out = out * 10 + (s[i] - '0');
            if (out > std::numeric_limits<std::int64_t>::max()) throw Overflow("rational", "literal too large");
            ++i;
            ++count;
        }
    };
    i128 whole = 0;
    std::size_t nd = 0;
    digits(whole, nd);
    i128 n = whole, d = 1;
    if (i < s.size() && s[i] == '.') {
        ++i;
        i128 frac = 0;
        std::size_t nf = 0;
        digits(frac, nf);
        if (nd == 0 && nf == 0) throw fail();
        i128 scale = 1;
        for (std::size_t k = 0; k < nf; ++k) {
            scale *= 10;
            if (scale > std::numeric_limits<std::int64_t>::max()) throw Overflow("rational", "literal too long");
        }
        n = whole * scale + frac;
        d = scale;
    } else if (i < s.size() && s[i] == '/') {
        if (nd == 0) throw fail();
        ++i;
        i128 den = 0;
        std::size_t ndd = 0;
        digits(den, ndd);
        if (ndd == 0 || den == 0) throw fail();
        d = den;
    } else if (nd == 0) {
        throw fail();
    }
    if (i != s.size()) throw fail();
    return make(neg ? -n : n, d);
}

}  // namespace ergolab
