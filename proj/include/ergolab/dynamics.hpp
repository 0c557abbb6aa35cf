#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ergolab/torus.hpp"

namespace ergolab::dyn {

using cplx = std::complex<double>;

// Torus points are fixed-point coordinates; on a cyclic space the single coordinate holds the residue.
using Point = std::vector<Fix>;

struct TorusRotation {
    std::vector<Angle> angles;  // one per coordinate
};
struct CyclicRotation {
    long modulus = 1;
    long step = 0;
};
// (x, y) -> (x + alpha, y + x + beta)
struct SkewProduct {
    Angle alpha, beta;
};

struct TransformSpec {
    std::variant<TorusRotation, CyclicRotation, SkewProduct> kind;

    static TransformSpec rotation(std::vector<Angle> angles) { return {TorusRotation{std::move(angles)}}; }
    static TransformSpec cyclic(long m, long step) { return {CyclicRotation{m, step}}; }
    static TransformSpec skew(Angle a, Angle b) { return {SkewProduct{std::move(a), std::move(b)}}; }

    size_t dim() const;
    bool is_cyclic() const { return std::holds_alternative<CyclicRotation>(kind); }
    bool ergodic() const;
    std::string str() const;
};

// p must fit in 63 bits
Point iterate_power(const TransformSpec& T, long long p, const Point& x);
Point iterate_power(const TransformSpec& T, const mpz_class& p, const Point& x);
// same as iterate_power, writing into a preallocated point
void iterate_power_into(const TransformSpec& T, long long p, const Point& x, Point& out);
// x <- T x, cheaper than iterate_power(T, 1, x)
void step(const TransformSpec& T, Point& x);

struct SampleSpec {
    enum class Kind { Uniform, LowDiscrepancy, AllResidues };
    Kind kind = Kind::Uniform;
    size_t count = 16;
    std::uint64_t seed = 1;
};

struct System {
    std::vector<TransformSpec> transforms;
    SampleSpec samples;

    size_t dim() const;
    bool cyclic() const;
    long modulus() const;  // cyclic only
    // throws DomainError for mixed spaces or non-commuting transforms
    void validate() const;
};

std::vector<Point> sample_points(const System& sys);

struct FourierSeries {
    std::vector<std::pair<std::vector<long>, cplx>> terms;  // frequency vector -> coefficient
};
struct BoxIndicator {
    std::vector<std::pair<double, double>> intervals;  // [lo, hi) per coordinate
};
struct Table {
    std::vector<cplx> values;  // per residue
};

class Observable {
public:
    std::variant<FourierSeries, BoxIndicator, Table> kind;

    static Observable fourier(std::vector<std::pair<std::vector<long>, cplx>> terms);
    static Observable character(std::vector<long> k) { return fourier({{std::move(k), cplx(1, 0)}}); }
    static Observable constant(cplx c, size_t dim) { return fourier({{std::vector<long>(dim, 0), c}}); }
    static Observable box(std::vector<std::pair<double, double>> intervals);
    static Observable table(std::vector<cplx> values);
    // residue r -> e(k r / m)
    static Observable cyclic_character(long m, long k);

    // cyclic spaces: Fourier and box act on r/m
    cplx eval(const Point& x, long modulus = 0) const;
    double bound() const;
    // zero-frequency coefficient, exact for Fourier/box/table
    cplx integral(size_t dim, long modulus = 0) const;
    void validate(size_t dim, long modulus = 0) const;
    std::string str() const;
};

struct CondExpEstimate {
    std::vector<Point> points;
    std::vector<cplx> birkhoff;               // (1/N) sum_{n=1}^N f(T^n x) per point
    std::optional<std::vector<cplx>> oracle;  // exact E(f|I)(x) per point
    bool estimate_only = false;
    long N = 0;
    double max_error() const;                 // against the oracle, 0 when there is none
};

CondExpEstimate conditional_expectation(const System& sys, size_t t, const Observable& f, long N);
// the exact E(f|I_T)(x) at the given points, when an oracle exists
std::optional<std::vector<cplx>> conditional_oracle(const System& sys, size_t t, const Observable& f,
                                                    const std::vector<Point>& pts);

// f(T^j x) for j = 0 .. len-1
std::vector<cplx> orbit_values(const TransformSpec& T, const Observable& f, const Point& x, size_t len,
                               long modulus = 0);

struct SeminormOptions {
    double loop_cap = 1e11;  // nominal samples * N^k
};

struct SeminormEstimate {
    int k = 1;
    std::vector<long> schedule;
    std::vector<double> values;
    std::optional<double> oracle;
    size_t samples = 0;
    std::uint64_t seed = 0;
};

SeminormEstimate ghk_seminorm(const System& sys, size_t t, const Observable& f, int k, const std::vector<long>& schedule,
                              const SeminormOptions& opt = {});
// Kronecker oracle for trig polynomials on an ergodic rotation, k <= 3
double kronecker_seminorm(const FourierSeries& f, int k);

struct DualSequence {
    int k = 2;
    long M = 0;
    long n0 = 0;
    std::vector<cplx> values;  // D(n0), D(n0+1), ...
};

DualSequence dual_sequence(const TransformSpec& T, const Observable& f, int k, const Point& x, long M, long n0,
                           long count, long modulus = 0);
// (1/count) sum_n f(T^n x) D(n), the finite form of  int f . D f
cplx dual_correlation(const TransformSpec& T, const Observable& f, const DualSequence& d, const Point& x,
                      long modulus = 0);

struct VdcReport {
    double lhs = 0, rhs = 0;
    bool holds = true;
    std::string violation;
};

// vectors are rows of equal length; v_{n+h} = 0 beyond N
VdcReport vdc_inequality_check(const std::vector<std::vector<cplx>>& v, long H);

}  // namespace ergolab::dyn
