#pragma once

#include <cstdint>
#include <vector>

#include "ergolab/dynamics.hpp"
#include "ergolab/hardy.hpp"

// Hot loops over n. Each parallel kernel splits [begin, end) into fixed chunks of kChunk indices
// and adds chunk partials in chunk order, so results do not depend on the thread count.
// The *_serial versions are plain left-to-right loops used as references.
namespace ergolab::kern {

using dyn::cplx;

constexpr std::size_t kChunk = 4096;

// n where MPFR precision had to be raised above the starting level, with the bits used
using Escalations = std::vector<std::pair<std::uint64_t, unsigned>>;

// [a(n)] for n = lo .. hi inclusive; throws Overflow past int64, PrecisionExhausted with n in the message
std::vector<std::int64_t> floor_values(const hardy::FloorEvaluator& a, std::uint64_t lo, std::uint64_t hi,
                                       Escalations* esc = nullptr);
std::vector<std::int64_t> floor_values_serial(const hardy::FloorEvaluator& a, std::uint64_t lo, std::uint64_t hi);

// sum over i in [begin, end) of e(k * seq[i] * alpha)
cplx weyl_sum(const std::vector<std::int64_t>& seq, std::size_t begin, std::size_t end, dyn::Fix alpha, long k);
cplx weyl_sum_serial(const std::vector<std::int64_t>& seq, std::size_t begin, std::size_t end, dyn::Fix alpha, long k);

struct MultiTerm {
    const dyn::TransformSpec* T;
    const dyn::Observable* f;
    const std::vector<std::int64_t>* powers;  // powers[i] is the exponent at sequence index i
};

// per point x: sum over i in [begin, end) of prod_j f_j(T_j^{powers_j[i]} x), times f0(x) when given
std::vector<cplx> multi_sum(const std::vector<MultiTerm>& terms, const std::vector<dyn::Point>& pts, std::size_t begin,
                            std::size_t end, long modulus, const dyn::Observable* f0 = nullptr);
std::vector<cplx> multi_sum_serial(const std::vector<MultiTerm>& terms, const std::vector<dyn::Point>& pts,
                                   std::size_t begin, std::size_t end, long modulus,
                                   const dyn::Observable* f0 = nullptr);

// prod_j f_j(T_j^{powers_j[i]} x) for i in [begin, end), one point
std::vector<cplx> term_values(const std::vector<MultiTerm>& terms, const dyn::Point& x, std::size_t begin,
                              std::size_t end, long modulus);

}  // namespace ergolab::kern
