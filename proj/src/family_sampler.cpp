#include "ergolab/sampler.hpp"

namespace ergolab::sampler {

using hardy::HardyExpr;
using reduction::TupleFamily;

namespace {

HardyExpr S(const HardyExpr& b, long h) { return b.shifted(ShiftPoly(h)); }

// 0, a shift, or a difference of two shifts
HardyExpr entry(Rng& rng, const HardyExpr& b, int zero_weight) {
    int r = std::uniform_int_distribution<int>(0, 2 + zero_weight)(rng);
    long h1 = std::uniform_int_distribution<long>(0, 3)(rng);
    long h2 = std::uniform_int_distribution<long>(0, 3)(rng);
    if (r == 0) return S(b, h1);
    if (r == 1) return S(b, h1) - S(b, h2);
    if (r == 2) return S(b, h1) * ShiftPoly(2) - S(b, h2);
    return HardyExpr();
}

}  // namespace

TupleFamily random_nice_family(Rng& rng, const FamilyOptions& opt) {
    for (;;) {
        int d = std::uniform_int_distribution<int>(1, opt.max_degree)(rng);
        std::size_t ell = std::uniform_int_distribution<std::size_t>(1, opt.max_ell)(rng);
        std::size_t m = std::uniform_int_distribution<std::size_t>(1, opt.max_m)(rng);
        TupleFamily f;
        f.ell = ell;
        f.bases.push_back(random_G(rng, d));
        for (std::size_t i = 1; i < ell; ++i) f.bases.push_back(random_G_below(rng, f.bases[0]));
        for (std::size_t j = 0; j < m; ++j) {
            reduction::Tuple t(ell);
            t[0] = j == 0 ? S(f.bases[0], std::uniform_int_distribution<long>(0, 3)(rng)) : entry(rng, f.bases[0], 1);
            for (std::size_t i = 1; i < ell; ++i) t[i] = entry(rng, f.bases[i], 2);
            bool bounded = true;
            for (auto& x : t) bounded = bounded && hardy::is_bounded(x);
            if (!bounded) f.tuples.push_back(std::move(t));
        }
        if (f.tuples.empty() || hardy::is_bounded(f.tuples[0][0])) continue;
        if (f.degree() < 1) continue;
        if (reduction::is_nice(f).nice) return f;
    }
}

}  // namespace ergolab::sampler
