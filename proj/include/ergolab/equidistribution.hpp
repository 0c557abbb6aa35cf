#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ergolab/hardy.hpp"
#include "ergolab/kernels.hpp"
#include "ergolab/torus.hpp"

namespace ergolab::equi {

struct FloorSequence {
    hardy::HardyExpr expr;
    std::uint64_t first = 1;           // values[i] = [expr(first + i)]
    std::vector<std::int64_t> values;
    kern::Escalations certificate;     // n where precision escalation fired
};

// [expr(n)] for n = first .. N
FloorSequence floor_seq(const hardy::HardyExpr& expr, std::uint64_t N, std::uint64_t first = 1);

struct WeylReport {
    hardy::HardyExpr expr;
    std::string alpha;
    dyn::Fix alpha_fix = 0;
    long k = 1;
    std::vector<long> schedule;
    std::vector<double> magnitudes;  // |(1/N) sum_{n<=N} e(k [expr(n)] alpha)|
    double phase_error = 0;          // bound on |k [a(n)]| * 2^-128 over the range, in turns
};

WeylReport weyl_sum(const hardy::HardyExpr& expr, const dyn::Angle& alpha, long k, const std::vector<long>& schedule);
// same, from a precomputed sequence; n runs from seq.first to N and the sum is divided by N
WeylReport weyl_sum(const FloorSequence& seq, const dyn::Angle& alpha, long k, const std::vector<long>& schedule);

// exact 1-D star discrepancy of points in [0,1)
double star_discrepancy(std::vector<double> pts);

struct GridDiscrepancy {
    int grid = 0;  // cells per axis
    double value = 0;
};
// sup over anchored grid boxes [0, j_1/g) x ... of |empirical - volume|
GridDiscrepancy grid_discrepancy(const std::vector<std::vector<double>>& pts, int grid);

struct JointSpec {
    hardy::HardyExpr expr;
    dyn::Angle alpha;
    dyn::Fix x = 0;
};

struct JointReport {
    long N = 0;
    int grid = 0;
    double max_dev_lebesgue = 0;  // against the product of Lebesgue measures
    double max_dev_target = 0;    // against the product of orbit-closure measures
    std::string target;           // description of the target measure per coordinate
    bool regime_ok = true;        // in_class_G, positive degree and different growth
    std::string regime_note;
};

JointReport joint_equidistribution_check(const std::vector<JointSpec>& specs, long N, int grid);

struct FactorizationReport {
    std::complex<double> joint;
    std::complex<double> product_of_limits;
    double std_error = 0;
    bool within = false;  // |joint - product| <= 3 std_error
};

// joint average of prod_i e(k_i ([a_i(n)] alpha_i + x_i)) against the product of the single-coordinate limits
FactorizationReport product_character_check(const std::vector<JointSpec>& specs, const std::vector<long>& k, long N);

}  // namespace ergolab::equi
