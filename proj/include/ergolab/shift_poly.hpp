#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace ergolab {

// Polynomial over Q in formal shift symbols h, h1, h2, ... (symbol 0 prints as "h").
class ShiftPoly {
public:
    // sorted by variable index, exponents > 0
    using Monomial = std::vector<std::pair<std::uint32_t, std::uint32_t>>;
    struct Term {
        Monomial mono;
        mpq_class coef;
    };

    ShiftPoly() = default;
    ShiftPoly(const mpq_class& c);  // NOLINT(implicit)
    ShiftPoly(long c) : ShiftPoly(mpq_class(c)) {}  // NOLINT(implicit)
    static ShiftPoly symbol(std::uint32_t var);

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.empty()); }
    mpq_class constant() const;  // constant term
    std::uint32_t total_degree() const;
    std::set<std::uint32_t> symbols() const;
    const std::vector<Term>& terms() const { return terms_; }

    ShiftPoly operator-() const;
    friend ShiftPoly operator+(const ShiftPoly& a, const ShiftPoly& b);
    friend ShiftPoly operator-(const ShiftPoly& a, const ShiftPoly& b);
    friend ShiftPoly operator*(const ShiftPoly& a, const ShiftPoly& b);
    friend ShiftPoly operator*(const ShiftPoly& a, const mpq_class& c);
    ShiftPoly& operator+=(const ShiftPoly& o) { return *this = *this + o; }
    ShiftPoly& operator-=(const ShiftPoly& o) { return *this = *this - o; }
    ShiftPoly pow(unsigned k) const;

    // substitute values for symbols; missing symbols are an error
    mpq_class evaluate(const std::map<std::uint32_t, mpq_class>& values) const;
    // substitute a value for one symbol, keep the others formal
    ShiftPoly substitute(std::uint32_t var, const mpq_class& value) const;

    friend bool operator==(const ShiftPoly& a, const ShiftPoly& b);
    friend bool operator<(const ShiftPoly& a, const ShiftPoly& b);

    std::string str() const;
    static std::string symbol_name(std::uint32_t var);

private:
    void normalize();
    std::vector<Term> terms_;  // canonical monomial order, no zero coefficients
};

// canonical monomial order: higher total degree first, then lexicographic on (var, exp)
bool monomial_before(const ShiftPoly::Monomial& a, const ShiftPoly::Monomial& b);

std::string rational_str(const mpq_class& q);

}  // namespace ergolab
