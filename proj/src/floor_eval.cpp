#include <atomic>
#include <cmath>
#include <limits>

#include "ergolab/errors.hpp"
#include "ergolab/hardy.hpp"
#include "ergolab/mpfr_util.hpp"

namespace ergolab::hardy {

namespace {
std::atomic<unsigned> g_floor_bits{8192};
}

void set_default_floor_bits(unsigned max_bits) {
    if (max_bits < 64) throw DomainError("set_default_floor_bits", "need at least 64 bits");
    g_floor_bits = max_bits;
}
unsigned default_floor_bits() { return g_floor_bits; }

namespace {

using u128 = unsigned __int128;

// r^v <= x without overflow
bool pow_le(u128 r, std::int64_t v, u128 x) {
    u128 acc = 1;
    for (std::int64_t i = 0; i < v; ++i) {
        if (r != 0 && acc > x / r) return false;
        acc *= r;
    }
    return acc <= x;
}

u128 iroot_u128(u128 x, std::int64_t v) {
    if (v == 1 || x < 2) return x;
    long double est = std::pow(static_cast<long double>(x), 1.0L / static_cast<long double>(v));
    u128 r = est < 1 ? 0 : static_cast<u128>(est);
    while (r > 0 && !pow_le(r, v, x)) --r;
    while (pow_le(r + 1, v, x)) ++r;
    return r;
}

unsigned bit_length(std::uint64_t n) { return n == 0 ? 0 : 64 - static_cast<unsigned>(__builtin_clzll(n)); }

mpz_class from_u128(u128 x) {
    mpz_class hi(static_cast<unsigned long>(static_cast<std::uint64_t>(x >> 64)));
    mpz_class lo(static_cast<unsigned long>(static_cast<std::uint64_t>(x)));
    return (hi << 64) + lo;
}

bool perfect_root(const mpz_class& x, unsigned long v, mpz_class& root) {
    return mpz_root(root.get_mpz_t(), x.get_mpz_t(), v) != 0;
}

// r^(u/v) for rational r > 0 if it is rational
std::optional<mpq_class> rational_power(const mpq_class& r, const Rational& e) {
    std::int64_t u = e.num(), v = e.den();
    unsigned long au = static_cast<unsigned long>(u < 0 ? -u : u);
    mpz_class nu, de;
    mpz_pow_ui(nu.get_mpz_t(), r.get_num_mpz_t(), au);
    mpz_pow_ui(de.get_mpz_t(), r.get_den_mpz_t(), au);
    mpz_class rn, rd;
    if (!perfect_root(nu, static_cast<unsigned long>(v), rn)) return std::nullopt;
    if (!perfect_root(de, static_cast<unsigned long>(v), rd)) return std::nullopt;
    mpq_class out = u >= 0 ? mpq_class(rn, rd) : mpq_class(rd, rn);
    out.canonicalize();
    return out;
}

struct Interval {
    Mpfr lo, hi;
    explicit Interval(mpfr_prec_t p) : lo(p), hi(p) {}
};

// positive base interval raised to u/v
void pow_interval(Interval& out, const Interval& base, const Rational& e) {
    std::int64_t u = e.num(), v = e.den();
    auto up = static_cast<unsigned long>(u < 0 ? -u : u);
    mpfr_prec_t p = mpfr_get_prec(out.lo.get());
    Mpfr lo(p), hi(p);
    if (u >= 0) {
        mpfr_pow_ui(lo.get(), base.lo.get(), up, MPFR_RNDD);
        mpfr_rootn_ui(out.lo.get(), lo.get(), static_cast<unsigned long>(v), MPFR_RNDD);
        mpfr_pow_ui(hi.get(), base.hi.get(), up, MPFR_RNDU);
        mpfr_rootn_ui(out.hi.get(), hi.get(), static_cast<unsigned long>(v), MPFR_RNDU);
    } else {
        // 1 / base^(|u|/v)
        mpfr_pow_ui(lo.get(), base.lo.get(), up, MPFR_RNDD);
        mpfr_rootn_ui(lo.get(), lo.get(), static_cast<unsigned long>(v), MPFR_RNDD);
        mpfr_pow_ui(hi.get(), base.hi.get(), up, MPFR_RNDU);
        mpfr_rootn_ui(hi.get(), hi.get(), static_cast<unsigned long>(v), MPFR_RNDU);
        mpfr_ui_div(out.lo.get(), 1, hi.get(), MPFR_RNDD);
        mpfr_ui_div(out.hi.get(), 1, lo.get(), MPFR_RNDU);
    }
}

}  // namespace

FloorEvaluator::FloorEvaluator(const HardyExpr& e, FloorOptions opt) : opt_(opt) {
    if (!e.symbols().empty())
        throw DomainError("hardy_core.floor_eval", "expression depends on a formal shift symbol: " + e.str());
    for (auto& [a, c] : e.atoms())
        parts_.push_back({c.constant(), a.shift.constant(), a.key.p, a.key.q});
    if (parts_.size() == 1 && parts_[0].shift == 0 && parts_[0].q.is_zero()) {
        pure_ = true;
        a_ = parts_[0].coef.get_num();
        b_ = parts_[0].coef.get_den();
        u_ = parts_[0].p.num();
        v_ = parts_[0].p.den();
    }
}

mpz_class FloorEvaluator::operator()(std::uint64_t n, FloorInfo* info) const {
    if (n == 0) throw DomainError("hardy_core.floor_eval", "n must be positive");
    if (info) info->bits_used = 0;
    if (parts_.empty()) return 0;
    if (pure_) {
        bool neg = a_ < 0;
        std::int64_t au = u_ < 0 ? -u_ : u_;
        // fast u128 route for unit coefficient
        if (a_ * a_ == 1 && b_ == 1 && u_ >= 0 && bit_length(n) * static_cast<unsigned>(au) <= 126) {
            u128 x = 1;
            for (std::int64_t i = 0; i < au; ++i) x *= n;
            u128 r = iroot_u128(x, v_);
            mpz_class fr = from_u128(r);
            if (!neg) return fr;
            // exact iff r^v == x
            u128 acc = 1;
            for (std::int64_t i = 0; i < v_; ++i) acc *= r;
            return acc == x ? mpz_class(-fr) : mpz_class(-fr - 1);
        }
        mpz_class nn(static_cast<unsigned long>(n)), npow, av = neg ? mpz_class(-a_) : a_, num, den;
        mpz_pow_ui(npow.get_mpz_t(), nn.get_mpz_t(), static_cast<unsigned long>(au));
        mpz_pow_ui(num.get_mpz_t(), av.get_mpz_t(), static_cast<unsigned long>(v_));
        mpz_pow_ui(den.get_mpz_t(), b_.get_mpz_t(), static_cast<unsigned long>(v_));
        if (u_ >= 0) num *= npow;
        else den *= npow;
        mpz_class q, rem;
        mpz_fdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
        mpz_class r;
        bool exact_root = mpz_root(r.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(v_)) != 0;
        if (!neg) return r;
        bool exact = exact_root && rem == 0;
        return exact ? mpz_class(-r) : mpz_class(-r - 1);
    }

    // rational/irrational split
    mpq_class exact_sum = 0;
    std::vector<const Part*> irr;
    std::vector<mpq_class> bases;
    for (auto& pt : parts_) {
        mpq_class r = mpq_class(static_cast<unsigned long>(n)) + pt.shift;
        if (r <= 0) throw DomainError("hardy_core.floor_eval", "evaluation point t+shift is not positive");
        if (!pt.q.is_zero()) {
            if (r == 1) {
                if (pt.q > Rational(0)) continue;  // (log 1)^q = 0
                throw DomainError("hardy_core.floor_eval", "negative power of log at t = 1");
            }
            if (r < 1 && !pt.q.is_integer())
                throw DomainError("hardy_core.floor_eval", "non-integer power of a negative logarithm");
            irr.push_back(&pt);
            bases.push_back(r);
            continue;
        }
        if (auto v = rational_power(r, pt.p)) {
            exact_sum += pt.coef * *v;
            continue;
        }
        irr.push_back(&pt);
        bases.push_back(r);
    }
    if (irr.empty()) {
        mpz_class f;
        mpz_fdiv_q(f.get_mpz_t(), exact_sum.get_num_mpz_t(), exact_sum.get_den_mpz_t());
        return f;
    }
    for (unsigned bits = opt_.start_bits; bits <= opt_.max_bits; bits *= 2) {
        auto prec = static_cast<mpfr_prec_t>(bits);
        Interval total(prec);
        mpfr_set_zero(total.lo.get(), 1);
        mpfr_set_zero(total.hi.get(), 1);
        bool usable = true;
        for (std::size_t i = 0; i < irr.size() && usable; ++i) {
            const Part& pt = *irr[i];
            const mpq_class& r = bases[i];
            Interval base(prec), val(prec);
            mpfr_set_q(base.lo.get(), r.get_mpq_t(), MPFR_RNDD);
            mpfr_set_q(base.hi.get(), r.get_mpq_t(), MPFR_RNDU);
            pow_interval(val, base, pt.p);
            int sign = 1;
            if (!pt.q.is_zero()) {
                Interval lg(prec), lq(prec);
                if (r > 1) {
                    mpfr_log(lg.lo.get(), base.lo.get(), MPFR_RNDD);
                    mpfr_log(lg.hi.get(), base.hi.get(), MPFR_RNDU);
                } else {
                    // |log r| = log(1/r)
                    Interval inv(prec);
                    mpfr_ui_div(inv.lo.get(), 1, base.hi.get(), MPFR_RNDD);
                    mpfr_ui_div(inv.hi.get(), 1, base.lo.get(), MPFR_RNDU);
                    mpfr_log(lg.lo.get(), inv.lo.get(), MPFR_RNDD);
                    mpfr_log(lg.hi.get(), inv.hi.get(), MPFR_RNDU);
                    if (pt.q.num() % 2 != 0) sign = -1;
                }
                if (mpfr_sgn(lg.lo.get()) <= 0) {
                    usable = false;
                    break;
                }
                pow_interval(lq, lg, pt.q);
                mpfr_mul(val.lo.get(), val.lo.get(), lq.lo.get(), MPFR_RNDD);
                mpfr_mul(val.hi.get(), val.hi.get(), lq.hi.get(), MPFR_RNDU);
            }
            mpq_class c = pt.coef * sign;
            Interval scaled(prec);
            if (c > 0) {
                mpfr_mul_q(scaled.lo.get(), val.lo.get(), c.get_mpq_t(), MPFR_RNDD);
                mpfr_mul_q(scaled.hi.get(), val.hi.get(), c.get_mpq_t(), MPFR_RNDU);
            } else {
                mpfr_mul_q(scaled.lo.get(), val.hi.get(), c.get_mpq_t(), MPFR_RNDD);
                mpfr_mul_q(scaled.hi.get(), val.lo.get(), c.get_mpq_t(), MPFR_RNDU);
            }
            mpfr_add(total.lo.get(), total.lo.get(), scaled.lo.get(), MPFR_RNDD);
            mpfr_add(total.hi.get(), total.hi.get(), scaled.hi.get(), MPFR_RNDU);
        }
        if (!usable) continue;
        mpfr_add_q(total.lo.get(), total.lo.get(), exact_sum.get_mpq_t(), MPFR_RNDD);
        mpfr_add_q(total.hi.get(), total.hi.get(), exact_sum.get_mpq_t(), MPFR_RNDU);
        mpz_class flo, fhi;
        mpfr_get_z(flo.get_mpz_t(), total.lo.get(), MPFR_RNDD);
        mpfr_get_z(fhi.get_mpz_t(), total.hi.get(), MPFR_RNDD);
        if (flo == fhi) {
            if (info) info->bits_used = bits;
            return flo;
        }
    }
    throw PrecisionExhausted("hardy_core.floor_eval",
                             "value at n = " + std::to_string(n) + " stays within 2^-80 of an integer at " +
                                 std::to_string(opt_.max_bits) + " bits");
}

std::int64_t FloorEvaluator::small(std::uint64_t n, FloorInfo* info) const {
    if (pure_ && a_ == 1 && b_ == 1 && u_ >= 0) {
        std::int64_t au = u_;
        if (bit_length(n) * static_cast<unsigned>(au) <= 126) {
            u128 x = 1;
            for (std::int64_t i = 0; i < au; ++i) x *= n;
            u128 r = iroot_u128(x, v_);
            if (info) info->bits_used = 0;
            if (r > static_cast<u128>(std::numeric_limits<std::int64_t>::max()))
                throw Overflow("hardy_core.floor_eval", "value exceeds 64 bits");
            return static_cast<std::int64_t>(r);
        }
    }
    mpz_class v = (*this)(n, info);
    if (!v.fits_slong_p()) throw Overflow("hardy_core.floor_eval", "value exceeds 64 bits");
    return v.get_si();
}

mpz_class floor_eval(const HardyExpr& e, std::uint64_t n, const FloorOptions& opt, FloorInfo* info) {
    return FloorEvaluator(e, opt)(n, info);
}

}  // namespace ergolab::hardy
