#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ergolab/rational.hpp"
#include "ergolab/shift_poly.hpp"

namespace ergolab::hardy {

// t^p (log t)^q, ordered by growth: lexicographic in (p, q)
struct Key {
    Rational p;
    Rational q;
    friend bool operator==(const Key&, const Key&) = default;
    friend std::strong_ordering operator<=>(const Key& a, const Key& b) {
        if (auto c = a.p <=> b.p; c != 0) return c;
        return a.q <=> b.q;
    }
    bool is_polynomial() const { return q.is_zero() && p.is_integer() && p.num() >= 0; }
    std::string str() const;
};

// S_shift (t^p (log t)^q). Polynomial monomials are never stored shifted.
struct Atom {
    Key key;
    ShiftPoly shift;
};

struct AtomOrder {
    bool operator()(const Atom& a, const Atom& b) const {
        if (a.key != b.key) return a.key > b.key;
        return a.shift < b.shift;
    }
};

struct Term {
    ShiftPoly coef;
    Key key;
};

// Asymptotic expansion: terms strictly descending, all keys > trunc when trunc is set.
struct Expansion {
    std::vector<Term> terms;
    std::optional<Key> trunc;
    std::string str() const;
};

// Exact element of the fragment, stored by origin: a finite Q[h]-combination of atoms.
// Exact zero <=> no atoms.
class HardyExpr {
public:
    using AtomMap = std::map<Atom, ShiftPoly, AtomOrder>;

    HardyExpr() = default;
    static HardyExpr constant(const ShiftPoly& c);
    static HardyExpr monomial(const ShiftPoly& c, Rational p, Rational q = Rational(0));
    static HardyExpr shifted_monomial(const ShiftPoly& c, Rational p, Rational q, const ShiftPoly& shift);
    static HardyExpr t() { return monomial(ShiftPoly(1), Rational(1)); }

    bool is_zero() const { return atoms_.empty(); }
    bool is_scalar() const;  // only the constant atom (may depend on h)
    bool has_shifted_atoms() const;
    const AtomMap& atoms() const { return atoms_; }
    std::set<std::uint32_t> symbols() const;
    std::set<std::uint32_t> shift_symbols() const;  // symbols occurring in shifts of atoms or in coefficients
    Rational max_power() const;                     // largest p over atoms, 0 for zero

    HardyExpr shifted(const ShiftPoly& offset) const;  // exact S_offset
    HardyExpr operator-() const;
    friend HardyExpr operator+(const HardyExpr& a, const HardyExpr& b);
    friend HardyExpr operator-(const HardyExpr& a, const HardyExpr& b);
    friend HardyExpr operator*(const HardyExpr& a, const ShiftPoly& c);
    HardyExpr& operator+=(const HardyExpr& o);
    HardyExpr& operator-=(const HardyExpr& o);

    friend bool operator==(const HardyExpr& a, const HardyExpr& b);

    std::string str() const;
    static HardyExpr parse(std::string_view text);

private:
    void add_atom(const Atom& a, const ShiftPoly& c);
    AtomMap atoms_;
};

// ---- spec operations ----

HardyExpr canonicalize(const HardyExpr& e);  // already canonical by construction
Expansion canonicalize(std::vector<Term> terms, std::optional<Key> trunc);

// expansion with K relative orders per shifted atom: t^p .. t^{p-(K-1)}
Expansion expand(const HardyExpr& e, int order);
// expansion whose terms with p >= stop_p are all present and exact
Expansion expand_to(const HardyExpr& e, Rational stop_p);
Expansion shift(const HardyExpr& e, const ShiftPoly& offset, int order);

HardyExpr derivative(const HardyExpr& e);
HardyExpr combine(const std::vector<long>& coeffs, const std::vector<HardyExpr>& exprs);
HardyExpr multiply_monomial(const HardyExpr& e, Rational p, Rational q);  // unshifted atoms only
HardyExpr instantiate(const HardyExpr& e, const std::map<std::uint32_t, mpq_class>& values);
HardyExpr substitute(const HardyExpr& e, std::uint32_t var, const mpq_class& value);
// e = sum_k k_sigma S_sigma base with integer k_sigma (base unshifted)
bool in_shift_family(const HardyExpr& e, const HardyExpr& base);

struct LeadingTerm {
    ShiftPoly coef;
    Key key;
};
std::optional<LeadingTerm> leading_term(const HardyExpr& e);

enum class Relation { Less, Greater, Similar };
struct GrowthComparison {
    Relation rel;
    ShiftPoly ratio_num;  // ratio a/b of leading coefficients when Similar
    ShiftPoly ratio_den;
    std::optional<mpq_class> ratio() const;  // when both are h-free
};
GrowthComparison compare_growth(const HardyExpr& a, const HardyExpr& b);

int degree_of_key(const Key& k);
int degree(const HardyExpr& e);

enum class GrowthTag { Vanishing, BoundedNonvanishing, Unbounded };
struct GrowthClass {
    GrowthTag tag;
    int degree_value;
};
GrowthClass growth_class(const HardyExpr& e);
bool is_bounded(const HardyExpr& e);

bool equivalent(const HardyExpr& a, const HardyExpr& b, std::string* note = nullptr);
// terms with key >= (d, 0): two degree-d functions are equivalent iff their heads agree
std::vector<Term> equivalence_head(const HardyExpr& e, int d);

bool in_class_G(const HardyExpr& e);
bool different_growth(const std::vector<HardyExpr>& list);

struct ShiftCombo {
    long k;
    long h;
};
struct ShiftComboCoeffs {
    std::vector<mpq_class> c;  // c_0..c_d
    bool vanishing;
    int first_nonzero;  // -1 when vanishing
};
ShiftComboCoeffs shift_combo_coeffs(const HardyExpr& base, const std::vector<ShiftCombo>& combo);
HardyExpr apply_combo(const HardyExpr& base, const std::vector<ShiftCombo>& combo);

// numeric evaluation at real t with h symbols replaced by values (MPFR, round to nearest)
double evaluate_ratio(const HardyExpr& a, const HardyExpr& b, const std::string& t,
                      const std::map<std::uint32_t, mpq_class>& hvals, unsigned prec_bits = 512);
std::string evaluate_str(const HardyExpr& e, const std::string& t, const std::map<std::uint32_t, mpq_class>& hvals,
                         unsigned prec_bits = 256, int digits = 30);

// ---- floor evaluation ----

// process-wide escalation cap used by default-constructed FloorOptions (8192 unless changed)
void set_default_floor_bits(unsigned max_bits);
unsigned default_floor_bits();

struct FloorOptions {
    unsigned start_bits = 64;
    unsigned max_bits = default_floor_bits();
};
struct FloorInfo {
    unsigned bits_used = 0;  // 0: exact integer path
};
mpz_class floor_eval(const HardyExpr& e, std::uint64_t n, const FloorOptions& opt = {}, FloorInfo* info = nullptr);

// Prepared evaluator for repeated n. Pure powers c*t^(u/v) use exact integer roots;
// everything else goes through rational splitting plus MPFR interval escalation.
class FloorEvaluator {
public:
    explicit FloorEvaluator(const HardyExpr& e, FloorOptions opt = {});
    mpz_class operator()(std::uint64_t n, FloorInfo* info = nullptr) const;
    // same value as int64; throws Overflow when it does not fit
    std::int64_t small(std::uint64_t n, FloorInfo* info = nullptr) const;
    bool exact_root_path() const { return pure_; }

private:
    struct Part {
        mpq_class coef;
        mpq_class shift;
        Rational p, q;
    };
    bool pure_ = false;
    mpz_class a_, b_;        // pure power coefficient a/b
    std::int64_t u_ = 0, v_ = 1;
    std::vector<Part> parts_;
    FloorOptions opt_;
};

}  // namespace ergolab::hardy
