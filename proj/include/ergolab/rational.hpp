#pragma once

#include <cstdint>
#include <compare>
#include <string>
#include <string_view>

namespace ergolab {

// Small exact rational for exponents. Overflow throws ergolab::Overflow.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT(implicit)
    Rational(std::int64_t n, std::int64_t d);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_integer() const { return den_ == 1; }
    bool is_zero() const { return num_ == 0; }
    std::int64_t floor() const;
    std::int64_t ceil() const;
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    Rational operator-() const;
    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }

    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

    // "3/2", "-1", "0"
    std::string str() const;
    // accepts "3", "-3/2", "1.25"
    static Rational parse(std::string_view s);

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace ergolab
