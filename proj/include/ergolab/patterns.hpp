#pragma once

#include <cstdint>
#include <gmpxx.h>
#include <optional>
#include <string>
#include <vector>

#include "ergolab/hardy.hpp"

namespace ergolab::pat {

using Vec = std::vector<long>;

// E inside the box [-L, L)^d, one byte per lattice point
class DenseSet {
public:
    DenseSet(int dim, long L);
    static DenseSet full(int dim, long L);
    static DenseSet random(int dim, long L, double density, std::uint64_t seed);
    static DenseSet from_points(int dim, long L, const std::vector<Vec>& pts);

    int dim() const { return dim_; }
    long L() const { return L_; }
    std::size_t volume() const { return bits_.size(); }
    bool in_box(const Vec& v) const;
    bool contains(const Vec& v) const;  // false outside the box
    void insert(const Vec& v);
    std::size_t count() const;
    mpq_class density() const { return mpq_class(count(), volume()); }

    // linear index <-> point
    std::size_t index(const Vec& v) const;
    Vec point(std::size_t i) const;
    bool at(std::size_t i) const { return bits_[i]; }

private:
    int dim_;
    long L_;
    std::vector<std::uint8_t> bits_;
};

struct Witness {
    Vec v;
    long n = 0;
};

struct ConfigSearch {
    std::vector<Witness> witnesses;  // lexicographic in (v, n), truncated at the cap
    std::size_t total = 0;           // all witnesses found
    std::size_t checked = 0;         // (v, n) pairs with every point inside the box
    bool regime_ok = true;
};

// all (v, n), n in [n_lo, n_hi], with v + [a_i(n)] v_i in E for every i (and v in E)
ConfigSearch find_multidim_config(const DenseSet& E, const std::vector<Vec>& vecs,
                                  const std::vector<hardy::HardyExpr>& a, long n_lo, long n_hi,
                                  std::size_t cap = 1000);

// a subset of [1, L] whose consecutive gaps (and first element) are at most s
struct SyndeticSet {
    long L = 0;
    long gap = 0;
    std::vector<long> members;
    std::vector<std::uint8_t> mask;  // mask[x] for x in [0, L]

    static SyndeticSet make(long L, std::vector<long> members);
    static SyndeticSet progression(long first, long step, long L);
    bool contains(long x) const { return x >= 1 && x <= L && mask[static_cast<std::size_t>(x)]; }
};

struct SystemWitness {
    bool found = false;
    std::vector<long> x;  // x_0 .. x_l
    long n = 0;
    std::size_t checked = 0;
    std::string note;  // "not found at scale L = ..." when absent
};

// x_i in E_i with c_i x_i - c x_0 = [a_i(n)] for every i, searched over n in [n_lo, n_hi] then x_0 ascending
SystemWitness syndetic_system_solve(const std::vector<SyndeticSet>& E, long c, const std::vector<long>& ci,
                                    const std::vector<hardy::HardyExpr>& a, long n_lo, long n_hi);

struct IntersectionReport {
    double value = 0;      // (1/N) sum_n density of E_0 & (E_1 - [a_1(n)]v_1) & ... over the v kept in the box
    double alpha = 0;      // box density of E_0 & (E_1 + k_1 v_1) & ...
    double bound = 0;      // alpha^(l+1)
    double boundary = 0;   // mean share of the box pushed outside by the shifts
    double sampling = 0;   // 3 sqrt(bound (1 - bound) / |box|)
    bool vacuous = false;  // alpha = 0
    bool holds = false;    // value >= bound - boundary - sampling
    long N = 0;
};

IntersectionReport intersection_average(const std::vector<DenseSet>& E, const std::vector<Vec>& vecs,
                                        const std::vector<hardy::HardyExpr>& a, long N,
                                        const std::vector<long>& k = {});

}  // namespace ergolab::pat
