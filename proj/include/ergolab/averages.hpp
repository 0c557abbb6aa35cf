#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ergolab/dynamics.hpp"
#include "ergolab/hardy.hpp"

namespace ergolab::avg {

using dyn::cplx;

// Which theorem hypothesis a counterexample breaks. Theorem-regime experiments have none.
enum class Failure { None, IntegerExponent, EqualGrowth, Noncommuting };
std::string failure_name(Failure f);
Failure parse_failure(const std::string& s);

struct AverageExperiment {
    dyn::System system;
    std::vector<dyn::Observable> f;      // f_1..f_l
    std::vector<hardy::HardyExpr> a;     // a_1..a_l
    std::vector<size_t> transform;       // T index for each i; empty means i -> i
    std::vector<long> schedule;
    Failure out_of_regime = Failure::None;

    size_t ell() const { return a.size(); }
    size_t transform_of(size_t i) const { return transform.empty() ? i : transform[i]; }
    // theorem regime: every a_i in G and pairwise different growth; throws DomainError otherwise
    void validate() const;
};

struct ScheduleRow {
    long N = 0;
    std::vector<cplx> values;  // per sample point
    double mean_abs = 0;       // mean over points of |value|
    double distance = 0;       // L2 distance to the target over the sample measure
    double seconds = 0;
};

struct ExperimentReport {
    std::string tag;  // "theorem-regime" or "out-of-regime: <hypothesis>"
    std::vector<ScheduleRow> rows;
    std::vector<cplx> target;  // prod_i E(f_i | I_{T_i}) per point
    bool target_exact = true;  // false when some factor had no oracle and was estimated
    double target_abs = 0;     // L2 norm of the target
    double tolerance = 0;
    bool tail_nonincreasing = false;
    bool consistent = false;
    std::string verdict;
    std::uint64_t seed = 0;
    size_t samples = 0;
};

// (1/N) sum_{n<=N} prod_i f_i(T_i^{[a_i(n)]} x) for each N in the schedule and each sample point
std::vector<ScheduleRow> multi_average(const AverageExperiment& exp);

// tolerance <= 0 picks the default 10/sqrt(N_max)
ExperimentReport limit_formula_report(const AverageExperiment& exp, double tolerance = 0);

struct RecurrenceRow {
    long N = 0;
    double estimate = 0;
    double std_error = 0;
    double seconds = 0;
};

struct RecurrenceReport {
    std::vector<RecurrenceRow> rows;
    double measure = 0;  // mu(A)
    double bound = 0;    // mu(A)^(l+1)
    bool exact = false;  // cyclic systems enumerate every residue
    bool holds = false;  // estimate >= bound - 3 std_error at the final N
    std::uint64_t seed = 0;
    size_t samples = 0;
};

// (1/N) sum_n mu(A & T_1^{-[a_1(n)]} A & ...), estimated by counting over the sample points
RecurrenceReport recurrence_report(const dyn::System& sys, const dyn::Observable& A, const std::vector<hardy::HardyExpr>& a,
                                   const std::vector<long>& schedule, const std::vector<size_t>& transform = {});

struct BlockRow {
    long R = 0;
    double value = 0;  // (1/N) sum_n |(1/R) sum_r F(Rn+r) - target|, averaged over points
};

struct BlockReport {
    long N = 0;
    std::vector<BlockRow> rows;
    bool decreasing = false;
};

BlockReport block_average_check(const AverageExperiment& exp, const std::vector<long>& R_schedule, long N);

struct ConstancyRow {
    long N = 0;
    double fraction = 0;  // share of n <= N with [a(nR+r)] = [a(nR)] for every r < R
};
// degree-zero iterates: [a(nR + r)] = [a(nR)] on a density-one set of n
std::vector<ConstancyRow> block_constancy(const hardy::HardyExpr& a, long R, const std::vector<long>& schedule);

struct SubsequenceReport {
    double uniform_average = 0;      // max over offsets M of |(1/N) sum_{M<n<=M+N} e(n beta)|
    double subsequence_average = 0;  // |(1/N) sum_{n} e([a(n)] beta)|
    long N = 0;
    std::uint64_t first = 1;
    bool both_small = false;         // both <= threshold
    double threshold = 0.05;
};

// requires log t < a < t
SubsequenceReport subsequence_average_check(const hardy::HardyExpr& a, const dyn::Angle& beta, long N,
                                            double threshold = 0.05);

struct ParityRuns {
    long longest = 0;
    std::uint64_t start = 0;  // first n of the longest run
    int parity = 0;
    long N = 0;
};

ParityRuns parity_runs(const hardy::HardyExpr& a, long N);

}  // namespace ergolab::avg
