#include "ergolab/equidistribution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ergolab/errors.hpp"

namespace ergolab::equi {

using dyn::Fix;

namespace {

void check_schedule(const std::vector<long>& schedule, const char* where) {
    if (schedule.empty()) throw DomainError(where, "empty schedule");
    for (size_t i = 0; i < schedule.size(); ++i)
        if (schedule[i] < 1 || (i && schedule[i] <= schedule[i - 1]))
            throw DomainError(where, "schedule must be positive and increasing");
}

// frac([a(n)] alpha + x) for every n in the sequence; rational alpha uses exact residues so that the
// point set lands exactly on the finite orbit
struct Coordinate {
    std::vector<Fix> table;  // rational alpha: value per residue mod q
    long q = 0;
    Fix alpha = 0, x = 0;

    explicit Coordinate(const JointSpec& s) : alpha(s.alpha.fix()), x(s.x) {
        if (s.alpha.is_rational()) {
            const mpq_class& r = s.alpha.rational_part();
            if (!r.get_den().fits_slong_p() || r.get_den() > 10000000)
                throw DomainError("joint_equidistribution_check", "rational angle denominator too large");
            q = r.get_den().get_si();
            mpz_class num = r.get_num();
            for (long j = 0; j < q; ++j) {
                mpz_class v = num * j;
                mpz_class m;
                mpz_fdiv_r_ui(m.get_mpz_t(), v.get_mpz_t(), static_cast<unsigned long>(q));
                table.push_back(x + dyn::fix_from_mpq(mpq_class(m, q)));
            }
        }
    }
    Fix at(std::int64_t p) const {
        if (q) return table[static_cast<size_t>(((p % q) + q) % q)];
        return x + dyn::mul(alpha, p);
    }
};

int cell_of(Fix u, int grid) { return static_cast<int>((u >> 64) * static_cast<unsigned __int128>(grid) >> 64); }

}  // namespace

// 2 when the expression has no value at n = 1 (log t in a denominator)
static std::uint64_t start_of(const hardy::HardyExpr& e) {
    try {
        hardy::floor_eval(e, 1);
        return 1;
    } catch (const DomainError&) {
        return 2;
    }
}

static std::uint64_t start_of(const std::vector<JointSpec>& specs) {
    std::uint64_t f = 1;
    for (auto& s : specs) f = std::max(f, start_of(s.expr));
    return f;
}

FloorSequence floor_seq(const hardy::HardyExpr& expr, std::uint64_t N, std::uint64_t first) {
    if (first < 1) throw DomainError("floor_seq", "first index must be at least 1");
    FloorSequence s;
    s.expr = expr;
    s.first = first;
    hardy::FloorEvaluator a(expr);
    s.values = kern::floor_values(a, first, N, &s.certificate);
    return s;
}

WeylReport weyl_sum(const FloorSequence& seq, const dyn::Angle& alpha, long k, const std::vector<long>& schedule) {
    check_schedule(schedule, "weyl_sum");
    auto f = static_cast<long>(seq.first);
    if (schedule.front() < f) throw DomainError("weyl_sum", "schedule starts before the first index");
    if (static_cast<size_t>(schedule.back() - f + 1) > seq.values.size()) throw DomainError("weyl_sum", "sequence too short");
    WeylReport r;
    r.expr = seq.expr;
    r.alpha = alpha.text();
    r.alpha_fix = alpha.fix();
    r.k = k;
    r.schedule = schedule;
    std::complex<double> s = 0;
    size_t done = 0;
    for (long N : schedule) {
        s += kern::weyl_sum(seq.values, done, static_cast<size_t>(N - f + 1), alpha.fix(), k);
        done = static_cast<size_t>(N - f + 1);
        r.magnitudes.push_back(std::abs(s) / static_cast<double>(N));
    }
    std::int64_t big = 0;
    for (size_t i = 0; i < done; ++i) big = std::max(big, std::abs(seq.values[i]));
    r.phase_error = std::ldexp(static_cast<double>(big) * std::abs(static_cast<double>(k)), -128);
    return r;
}

WeylReport weyl_sum(const hardy::HardyExpr& expr, const dyn::Angle& alpha, long k, const std::vector<long>& schedule) {
    check_schedule(schedule, "weyl_sum");
    return weyl_sum(floor_seq(expr, static_cast<std::uint64_t>(schedule.back()), start_of(expr)), alpha, k, schedule);
}

double star_discrepancy(std::vector<double> pts) {
    if (pts.empty()) throw DomainError("star_discrepancy", "no points");
    std::sort(pts.begin(), pts.end());
    double N = static_cast<double>(pts.size()), d = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
        d = std::max(d, (i + 1) / N - pts[i]);
        d = std::max(d, pts[i] - i / N);
    }
    return d;
}

GridDiscrepancy grid_discrepancy(const std::vector<std::vector<double>>& pts, int grid) {
    if (pts.empty() || grid < 1) throw DomainError("grid_discrepancy", "need points and a positive grid");
    size_t d = pts[0].size();
    double cells = std::pow(static_cast<double>(grid), static_cast<double>(d));
    if (cells > 1e8) throw BudgetExceeded("grid_discrepancy", "grid too fine for the dimension");
    std::vector<double> cnt(static_cast<size_t>(cells));
    for (auto& p : pts) {
        if (p.size() != d) throw DomainError("grid_discrepancy", "points of different dimension");
        size_t idx = 0;
        for (size_t i = 0; i < d; ++i) idx = idx * grid + std::min(grid - 1, static_cast<int>(p[i] * grid));
        cnt[idx] += 1;
    }
    // prefix sums along each axis
    size_t stride = 1;
    for (size_t ax = d; ax-- > 0;) {
        for (size_t i = 0; i < cnt.size(); ++i)
            if ((i / stride) % grid) cnt[i] += cnt[i - stride];
        stride *= grid;
    }
    GridDiscrepancy g{grid, 0};
    double N = static_cast<double>(pts.size());
    for (size_t i = 0; i < cnt.size(); ++i) {
        double vol = 1;
        size_t rest = i;
        for (size_t ax = 0; ax < d; ++ax, rest /= grid) vol *= static_cast<double>(rest % grid + 1) / grid;
        g.value = std::max(g.value, std::abs(cnt[i] / N - vol));
    }
    return g;
}

JointReport joint_equidistribution_check(const std::vector<JointSpec>& specs, long N, int grid) {
    if (specs.empty() || N < 1 || grid < 1) throw DomainError("joint_equidistribution_check", "bad arguments");
    size_t l = specs.size();
    double cells_d = std::pow(static_cast<double>(grid), static_cast<double>(l));
    if (cells_d > 1e7) throw BudgetExceeded("joint_equidistribution_check", "too many grid cells");
    size_t cells = static_cast<size_t>(cells_d);
    JointReport r;
    r.N = N;
    r.grid = grid;

    std::vector<hardy::HardyExpr> exprs;
    std::ostringstream note;
    for (auto& s : specs) {
        exprs.push_back(s.expr);
        if (!hardy::in_class_G(s.expr) || hardy::degree(s.expr) < 1) {
            r.regime_ok = false;
            note << s.expr.str() << " is not a positive-degree member of G; ";
        }
    }
    if (l > 1 && !hardy::different_growth(exprs)) {
        r.regime_ok = false;
        note << "growth rates are not pairwise different; ";
    }
    r.regime_note = note.str();

    std::vector<Coordinate> coord;
    std::vector<std::vector<std::int64_t>> seqs;
    std::ostringstream tgt;
    auto first = start_of(specs);
    long M = N - static_cast<long>(first) + 1;
    if (M < 1) throw DomainError("equidistribution", "N is below the first index");
    for (auto& s : specs) {
        coord.emplace_back(s);
        seqs.push_back(floor_seq(s.expr, static_cast<std::uint64_t>(N), first).values);
        if (coord.back().q) tgt << "uniform on " << coord.back().q << " points; ";
        else tgt << "Lebesgue; ";
    }
    r.target = tgt.str();

    std::vector<double> count(cells);
    for (long n = 0; n < M; ++n) {
        size_t idx = 0;
        for (size_t i = 0; i < l; ++i) idx = idx * grid + cell_of(coord[i].at(seqs[i][n]), grid);
        count[idx] += 1;
    }
    // per-coordinate target masses per cell
    std::vector<std::vector<double>> marg(l, std::vector<double>(grid, 1.0 / grid));
    for (size_t i = 0; i < l; ++i)
        if (coord[i].q) {
            std::fill(marg[i].begin(), marg[i].end(), 0.0);
            for (Fix u : coord[i].table) marg[i][cell_of(u, grid)] += 1.0 / coord[i].q;
        }
    for (size_t c = 0; c < cells; ++c) {
        double emp = count[c] / M, leb = 1 / cells_d, tar = 1;
        size_t rest = c;
        for (size_t i = l; i-- > 0; rest /= grid) tar *= marg[i][rest % grid];
        r.max_dev_lebesgue = std::max(r.max_dev_lebesgue, std::abs(emp - leb));
        r.max_dev_target = std::max(r.max_dev_target, std::abs(emp - tar));
    }
    return r;
}

FactorizationReport product_character_check(const std::vector<JointSpec>& specs, const std::vector<long>& k, long N) {
    if (specs.size() != k.size() || specs.empty() || N < 1)
        throw DomainError("product_character_check", "bad arguments");
    FactorizationReport r;
    r.product_of_limits = 1;
    std::vector<Coordinate> coord;
    std::vector<std::vector<std::int64_t>> seqs;
    auto first = start_of(specs);
    long M = N - static_cast<long>(first) + 1;
    if (M < 1) throw DomainError("equidistribution", "N is below the first index");
    for (size_t i = 0; i < specs.size(); ++i) {
        coord.emplace_back(specs[i]);
        seqs.push_back(floor_seq(specs[i].expr, static_cast<std::uint64_t>(N), first).values);
        // [a(n)] is equidistributed mod every q for the non-polynomial class: the limit vanishes unless k alpha is an integer
        if (dyn::integer_combination({specs[i].alpha}, {k[i]})) r.product_of_limits *= dyn::e(dyn::mul(specs[i].x, k[i]));
        else r.product_of_limits = 0;
    }
    std::complex<double> s = 0;
    for (long n = 0; n < M; ++n) {
        Fix ph = 0;
        for (size_t i = 0; i < specs.size(); ++i) ph += dyn::mul(coord[i].at(seqs[i][n]), k[i]);
        s += dyn::e(ph);
    }
    r.joint = s / static_cast<double>(M);
    r.std_error = 1 / std::sqrt(static_cast<double>(M));
    r.within = std::abs(r.joint - r.product_of_limits) <= 3 * r.std_error;
    return r;
}

}  // namespace ergolab::equi
