#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ergolab/errors.hpp"
#include "ergolab/hardy.hpp"

namespace ergolab::reduction {

using hardy::HardyExpr;
using Tuple = std::vector<HardyExpr>;

struct TupleFamily {
    std::size_t ell = 1;
    std::vector<Tuple> tuples;
    // bases[i] generates coordinate i; empty means a type-only family (reduction disabled)
    std::vector<HardyExpr> bases;
    std::uint32_t next_symbol = 1;  // first unused formal shift symbol

    std::size_t m() const { return tuples.size(); }
    int degree() const;  // max entry degree, -1 for the empty family
    void validate() const;
    std::string str() const;
};

struct TypeMatrix {
    int d = 0;
    std::vector<std::vector<int>> w;  // w[i][j]: classes of degree d - j in row i
    friend bool operator==(const TypeMatrix&, const TypeMatrix&) = default;
    std::string str() const;  // "(1 0 / 0 1)"
};

// tuple indices whose row-i entry is unbounded and earlier rows are bounded (i is 1-based)
std::vector<std::size_t> prime_indices(const TupleFamily& f, std::size_t i);
std::vector<HardyExpr> prime_subfamily(const TupleFamily& f, std::size_t i);

// d < 0: use the family degree
TypeMatrix type_matrix(const TupleFamily& f, int d = -1);
bool type_less(const TypeMatrix& a, const TypeMatrix& b);

struct NiceReport {
    bool nice = true;
    std::vector<std::string> violations;
};
// membership in the shift families is checked only when bases are present
NiceReport is_nice(const TupleFamily& f, bool check_membership = true);

TupleFamily vdc_operation(const TupleFamily& f, const Tuple& anchor, const ShiftPoly& h);

struct Anchor {
    Tuple coords;
    std::size_t source = 0;  // donating tuple index
    std::size_t row = 1;     // 1-based row that decided the choice
    std::string rule;
};
Anchor choose_reduction_tuple(const TupleFamily& f, bool check_nice = true);

struct ReductionStep {
    TupleFamily before;
    TypeMatrix type_before;
    Anchor anchor;
    std::uint32_t symbol = 0;
    TupleFamily after;
    TypeMatrix type_after;
    bool decreased = false;
    NiceReport nice_after;
    std::vector<long> excluded_h;  // integer values of the new symbol that break the step
};

struct ReductionTrace {
    int d = 0;  // shape of every type matrix in the trace
    std::vector<ReductionStep> steps;
    TupleFamily terminal;
    bool sound() const;  // every step decreased and stayed nice
};

struct ReduceOptions {
    int max_steps = 64;
    std::size_t max_tuples = 4096;
    bool excluded_h = false;  // scan integer h in [1, 64] at each step
};

struct MaxStepsExceeded : Error {
    MaxStepsExceeded(const std::string& what, ReductionTrace t) : Error("reduce_fully", what), partial(std::move(t)) {}
    ReductionTrace partial;
};

struct TupleBudgetExceeded : Error {
    TupleBudgetExceeded(const std::string& what, ReductionTrace t)
        : Error("reduce_fully", what), partial(std::move(t)) {}
    ReductionTrace partial;
};

ReductionTrace reduce_fully(const TupleFamily& f, const ReduceOptions& opt = {});

// values v in [lo, hi] such that substituting v for `symbol` breaks niceness, changes the type,
// or turns a tuple bounded
std::vector<long> excluded_shifts(const TupleFamily& f, std::uint32_t symbol, int d, long lo = 1, long hi = 64);

// "[(a, b); (c, d)]" with an optional trailing "bases: (x, y)"
TupleFamily parse_family(std::string_view text);
std::string format_tuple(const Tuple& t);

}  // namespace ergolab::reduction
