#include "ergolab/sampler.hpp"

namespace ergolab::sampler {

using hardy::HardyExpr;

namespace {

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

}  // namespace

HardyExpr random_G(Rng& rng, int degree) {
    static const std::vector<Rational> fracs = {Rational(1, 5), Rational(3, 10), Rational(1, 3), Rational(1, 2),
                                                Rational(2, 3), Rational(7, 10), Rational(4, 5)};
    static const std::vector<Rational> logs = {Rational(-1, 2), Rational(1, 2), Rational(1)};
    static const std::vector<mpq_class> coefs = {1, 2, mpq_class(1, 2), -1, mpq_class(3, 2)};
    mpq_class c = pick(rng, coefs);
    int form = std::uniform_int_distribution<int>(0, 2)(rng);
    Rational p, q;
    if (form == 2 && degree <= 2) {
        p = Rational(degree);
        q = Rational(3, 2);
    } else {
        // log corrections decay like q/(p log t); keep p away from 0 when they are present
        static const std::vector<Rational> wide = {Rational(1, 2), Rational(2, 3), Rational(7, 10), Rational(4, 5)};
        p = Rational(degree) + pick(rng, form == 1 && degree == 0 ? wide : fracs);
        q = form == 1 ? pick(rng, logs) : Rational(0);
    }
    HardyExpr e = HardyExpr::monomial(c, p, q);
    if (std::uniform_int_distribution<int>(0, 1)(rng)) {
        static const std::vector<Rational> gaps = {Rational(1, 2), Rational(1), Rational(3, 2)};
        e += HardyExpr::monomial(pick(rng, coefs), p - pick(rng, gaps));
    }
    return e;
}

HardyExpr random_G_below(Rng& rng, const HardyExpr& above) {
    auto top = hardy::leading_term(above);
    int d = hardy::degree(above);
    for (;;) {
        int dd = std::uniform_int_distribution<int>(0, std::max(d, 0))(rng);
        HardyExpr e = random_G(rng, dd);
        if (!top || hardy::leading_term(e)->key < top->key) return e;
    }
}

HardyExpr random_shift_combo(Rng& rng, const HardyExpr& base) {
    int terms = std::uniform_int_distribution<int>(1, 3)(rng);
    HardyExpr e;
    for (int i = 0; i < terms; ++i) {
        long k = std::uniform_int_distribution<long>(-2, 1)(rng);
        if (k >= 0) ++k;
        long h = std::uniform_int_distribution<long>(0, 4)(rng);
        e += base.shifted(ShiftPoly(h)) * ShiftPoly(k);
    }
    return e;
}

}  // namespace ergolab::sampler
