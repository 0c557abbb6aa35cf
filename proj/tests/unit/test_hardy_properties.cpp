// Randomised lemma checks with numeric confirmation at t = 1e6, 1e9, 1e12.
#include <cmath>

#include "doctest.h"
#include "ergolab/hardy.hpp"
#include "ergolab/sampler.hpp"

using namespace ergolab;
using namespace ergolab::hardy;

namespace {

const std::map<std::uint32_t, mpq_class> kNoH;

double ratio_value(const GrowthComparison& c) {
    REQUIRE(c.ratio());
    return c.ratio()->get_d();
}

// symbolic a ~ r b must show up numerically: within 10% at 1e12 and not drifting away
void confirm(const HardyExpr& a, const HardyExpr& b, double r) {
    double e6 = std::abs(evaluate_ratio(a, b, "1e6", kNoH) / r - 1);
    double e12 = std::abs(evaluate_ratio(a, b, "1e12", kNoH) / r - 1);
    double e9 = std::abs(evaluate_ratio(a, b, "1e9", kNoH) / r - 1);
    CHECK_MESSAGE(e12 < 0.10, a.str() << " / " << b.str());
    CHECK_MESSAGE(e12 <= std::max(e6, 1e-3), a.str() << " / " << b.str() << " e6=" << e6 << " e9=" << e9);
}

void confirm_less(const HardyExpr& a, const HardyExpr& b) {
    // a < b: the ratio shrinks along the three sample points
    double r6 = std::abs(evaluate_ratio(a, b, "1e6", kNoH));
    double r12 = std::abs(evaluate_ratio(a, b, "1e12", kNoH));
    CHECK_MESSAGE(r12 < std::max(r6, 1e-6), a.str() << " / " << b.str());
}

HardyExpr over_t(const HardyExpr& e, int k) { return multiply_monomial(e, Rational(-k), Rational(0)); }

bool above_t_eps(const HardyExpr& e) {
    auto lt = leading_term(e);
    return lt && lt->key.p > Rational(0);
}

}  // namespace

TEST_CASE("shift combinations behave like a/t^k") {
    sampler::Rng rng(101);
    int similar = 0, vanishing = 0;
    for (int trial = 0; trial < 200; ++trial) {
        int d = std::uniform_int_distribution<int>(0, 3)(rng);
        HardyExpr a = sampler::random_G(rng, d);
        std::vector<ShiftCombo> combo;
        int n = std::uniform_int_distribution<int>(1, 4)(rng);
        for (int i = 0; i < n; ++i)
            combo.push_back({std::uniform_int_distribution<long>(-3, 3)(rng), std::uniform_int_distribution<long>(0, 4)(rng)});
        auto cc = shift_combo_coeffs(a, combo);
        HardyExpr b = apply_combo(a, combo);
        if (cc.vanishing) {
            ++vanishing;
            if (!b.is_zero()) CHECK(compare_growth(b, over_t(a, d)).rel == Relation::Less);
            continue;
        }
        ++similar;
        HardyExpr ref = over_t(a, cc.first_nonzero);
        auto g = compare_growth(b, ref);
        REQUIRE(g.rel == Relation::Similar);
        confirm(b, ref, ratio_value(g));
    }
    CHECK(similar > 100);
    CHECK(vanishing > 0);
}

TEST_CASE("shifted difference against a dominated non-equivalent term") {
    sampler::Rng rng(202);
    int done = 0;
    while (done < 200) {
        HardyExpr a = sampler::random_G(rng, std::uniform_int_distribution<int>(0, 3)(rng));
        HardyExpr a1 = sampler::random_shift_combo(rng, a);
        HardyExpr a2 = sampler::random_shift_combo(rng, a);
        if (!above_t_eps(a1) || a2.is_zero()) continue;
        if (leading_term(a2)->key > leading_term(a1)->key || equivalent(a1, a2)) continue;
        ++done;
        for (long h = 1; h <= 5; ++h) {
            HardyExpr x = a1.shifted(ShiftPoly(h)) - a2;
            auto g = compare_growth(x, a1);
            REQUIRE(g.rel == Relation::Similar);
            if (h == 1 || h == 5) confirm(x, a1, ratio_value(g));
        }
        CHECK(compare_growth(a1.shifted(ShiftPoly::symbol(1)) - a2, a1).rel == Relation::Similar);
    }
}

TEST_CASE("shifted difference of equivalent functions drops a degree") {
    sampler::Rng rng(303);
    int done = 0;
    while (done < 200) {
        HardyExpr a = sampler::random_G(rng, std::uniform_int_distribution<int>(1, 3)(rng));
        HardyExpr a1 = sampler::random_shift_combo(rng, a);
        if (degree(a1) < 1) continue;
        HardyExpr a2 = std::uniform_int_distribution<int>(0, 1)(rng)
                           ? a1.shifted(ShiftPoly(std::uniform_int_distribution<long>(1, 3)(rng)))
                           : a1 + a.shifted(ShiftPoly(2)) - a.shifted(ShiftPoly(1));
        if (!equivalent(a1, a2)) continue;
        ++done;
        auto lt1 = leading_term(a1);
        HardyExpr bound = HardyExpr::monomial(lt1->coef, lt1->key.p - Rational(1), lt1->key.q);  // ~ a1/t
        int similar = 0;
        for (long h = 0; h <= 5; ++h) {
            HardyExpr x = a1.shifted(ShiftPoly(h)) - a2;
            if (x.is_zero()) continue;
            auto g = compare_growth(x, bound);
            CHECK(g.rel != Relation::Greater);
            if (g.rel == Relation::Similar) {
                ++similar;
                confirm(x, bound, ratio_value(g));
            } else {
                confirm_less(x, bound);
            }
        }
        CHECK(similar >= 5);
    }
}

TEST_CASE("derivative and unit shifts grow like a/t") {
    sampler::Rng rng(404);
    int done = 0;
    while (done < 200) {
        HardyExpr a = sampler::random_G(rng, std::uniform_int_distribution<int>(0, 3)(rng));
        if (!above_t_eps(a)) continue;
        ++done;
        HardyExpr ref = over_t(a, 1);
        auto g = compare_growth(derivative(a), ref);
        REQUIRE(g.rel == Relation::Similar);
        confirm(derivative(a), ref, ratio_value(g));
        for (long h = 1; h <= 5; h += 2) {
            HardyExpr x = a.shifted(ShiftPoly(h)) - a;
            auto gs = compare_growth(x, ref);
            REQUIRE(gs.rel == Relation::Similar);
            confirm(x, ref, ratio_value(gs));
        }
        auto gf = compare_growth(a.shifted(ShiftPoly::symbol(1)) - a, ref);
        CHECK(gf.rel == Relation::Similar);
        CHECK(gf.ratio_num.total_degree() == 1);
    }
}

TEST_CASE("derivative commutes with shifts") {
    sampler::Rng rng(505);
    for (int trial = 0; trial < 50; ++trial) {
        HardyExpr a = sampler::random_G(rng, std::uniform_int_distribution<int>(0, 3)(rng));
        ShiftPoly h = ShiftPoly::symbol(1) * mpq_class(2) + ShiftPoly(1);
        CHECK(derivative(a.shifted(h)) == derivative(a).shifted(h));
    }
}

TEST_CASE("comparison verdicts hold numerically") {
    sampler::Rng rng(606);
    for (int trial = 0; trial < 100; ++trial) {
        HardyExpr a = sampler::random_G(rng, std::uniform_int_distribution<int>(0, 3)(rng));
        HardyExpr b = sampler::random_G(rng, std::uniform_int_distribution<int>(0, 3)(rng));
        auto g = compare_growth(a, b);
        if (g.rel == Relation::Similar) {
            confirm(a, b, ratio_value(g));
        } else if (g.rel == Relation::Less) {
            confirm_less(a, b);
        } else {
            confirm_less(b, a);
        }
    }
}
