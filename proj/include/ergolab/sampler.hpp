#pragma once

#include <random>

#include "ergolab/family.hpp"
#include "ergolab/hardy.hpp"

// Random instances shared by property tests, the acceptance sweep and the CLI selftest.
namespace ergolab::sampler {

using Rng = std::mt19937_64;

// random element of G with the given degree. Log exponents stay mild so that
// numeric checks at t ~ 1e12 agree with the asymptotic verdicts.
hardy::HardyExpr random_G(Rng& rng, int degree);
// random base whose leading term is strictly below `above`
hardy::HardyExpr random_G_below(Rng& rng, const hardy::HardyExpr& above);
// random integer shift combination of base: sum k_i S_{h_i} base with |k_i| <= 2, h_i in [0, 4]
hardy::HardyExpr random_shift_combo(Rng& rng, const hardy::HardyExpr& base);

struct FamilyOptions {
    int max_degree = 3;
    std::size_t max_ell = 3;
    std::size_t max_m = 3;
};
// random nice family with d >= 1, drawn by rejection
reduction::TupleFamily random_nice_family(Rng& rng, const FamilyOptions& opt = {});

}  // namespace ergolab::sampler
