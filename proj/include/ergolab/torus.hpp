#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ergolab::dyn {

// Point of R/Z as a 128-bit binary fraction; addition and integer multiples wrap mod 1 exactly.
using Fix = unsigned __int128;

double to_double(Fix x);
Fix fix_from_double(double x);
// frac(v) truncated to 128 bits
Fix fix_from_mpq(const mpq_class& v);
std::string fix_hex(Fix x);

// p * x mod 1, exact in the fixed-point representation
inline Fix mul(Fix x, __int128 p) { return x * static_cast<Fix>(p); }

inline std::complex<double> e(Fix x) {
    double t = 6.283185307179586476925286766559 * to_double(x);
    return {std::cos(t), std::sin(t)};
}

// r + sum_j s_j sqrt(m_j) with squarefree m_j > 1; exact enough to decide rational independence
class Angle {
public:
    Angle() = default;
    static Angle rational(const mpq_class& r);
    // "1/3", "0.25", "sqrt(2)", "3*sqrt(5)/2", "golden", "1/2 + sqrt(3)", "-sqrt(7)"
    static Angle parse(std::string_view text);

    bool is_rational() const { return surds_.empty(); }
    const mpq_class& rational_part() const { return r_; }
    const std::vector<std::pair<unsigned long, mpq_class>>& surds() const { return surds_; }
    Fix fix() const { return fix_; }
    double value() const;
    const std::string& text() const { return text_; }

    friend Angle operator+(const Angle& a, const Angle& b);
    friend Angle operator*(long k, const Angle& a);

private:
    void finish();
    mpq_class r_;
    std::vector<std::pair<unsigned long, mpq_class>> surds_;  // sorted by radicand
    Fix fix_ = 0;
    std::string text_;
};

// does sum_i k_i a_i lie in Z?
bool integer_combination(const std::vector<Angle>& a, const std::vector<long>& k);
// 1, a_1, ..., a_d linearly independent over Q
bool rationally_independent(const std::vector<Angle>& a);

}  // namespace ergolab::dyn
