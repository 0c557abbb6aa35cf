#include <vector>

#include "ergolab/errors.hpp"
#include "ergolab/hardy.hpp"
#include "ergolab/mpfr_util.hpp"

namespace ergolab::hardy {

namespace {

void set_rational(mpfr_ptr out, const Rational& r) {
    mpfr_set_si(out, r.num(), MPFR_RNDN);
    mpfr_div_si(out, out, r.den(), MPFR_RNDN);
}

Mpfr evaluate(const HardyExpr& e, const std::string& t, const std::map<std::uint32_t, mpq_class>& hvals,
              mpfr_prec_t prec) {
    Mpfr tt(prec), sum(prec), x(prec), lg(prec), ex(prec), term(prec);
    if (mpfr_set_str(tt.get(), t.c_str(), 10, MPFR_RNDN) != 0)
        throw ParseError("hardy_core.evaluate", "bad real number '" + t + "'");
    mpfr_set_zero(sum.get(), 1);
    for (auto& [a, c] : e.atoms()) {
        mpq_class sh = a.shift.evaluate(hvals);
        mpq_class cc = c.evaluate(hvals);
        mpfr_add_q(x.get(), tt.get(), sh.get_mpq_t(), MPFR_RNDN);
        if (mpfr_sgn(x.get()) <= 0) throw DomainError("hardy_core.evaluate", "t + shift is not positive");
        set_rational(ex.get(), a.key.p);
        mpfr_pow(term.get(), x.get(), ex.get(), MPFR_RNDN);
        if (!a.key.q.is_zero()) {
            mpfr_log(lg.get(), x.get(), MPFR_RNDN);
            set_rational(ex.get(), a.key.q);
            mpfr_pow(lg.get(), lg.get(), ex.get(), MPFR_RNDN);
            mpfr_mul(term.get(), term.get(), lg.get(), MPFR_RNDN);
        }
        mpfr_mul_q(term.get(), term.get(), cc.get_mpq_t(), MPFR_RNDN);
        mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
    }
    return sum;
}

}  // namespace

double evaluate_ratio(const HardyExpr& a, const HardyExpr& b, const std::string& t,
                      const std::map<std::uint32_t, mpq_class>& hvals, unsigned prec_bits) {
    auto prec = static_cast<mpfr_prec_t>(prec_bits);
    Mpfr va = evaluate(a, t, hvals, prec);
    Mpfr vb = evaluate(b, t, hvals, prec);
    Mpfr q(prec);
    mpfr_div(q.get(), va.get(), vb.get(), MPFR_RNDN);
    return mpfr_get_d(q.get(), MPFR_RNDN);
}

std::string evaluate_str(const HardyExpr& e, const std::string& t, const std::map<std::uint32_t, mpq_class>& hvals,
                         unsigned prec_bits, int digits) {
    Mpfr v = evaluate(e, t, hvals, static_cast<mpfr_prec_t>(prec_bits));
    std::vector<char> buf(static_cast<std::size_t>(digits) + 64);
    mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", digits, v.get());
    return buf.data();
}

}  // namespace ergolab::hardy
