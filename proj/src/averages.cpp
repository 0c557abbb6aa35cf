#include "ergolab/averages.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "ergolab/errors.hpp"
#include "ergolab/kernels.hpp"

namespace ergolab::avg {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void check_schedule(const std::vector<long>& s, const char* where) {
    if (s.empty()) throw DomainError(where, "empty schedule");
    for (size_t i = 0; i < s.size(); ++i)
        if (s[i] < 1 || (i && s[i] <= s[i - 1])) throw DomainError(where, "schedule must be positive and increasing");
}

bool integer_power_above_one(const hardy::HardyExpr& a) {
    auto lt = hardy::leading_term(a);
    return lt && lt->key.p.is_integer() && lt->key.p.num() >= 2 && lt->key.q.is_zero();
}

// leading term c*t: the plain ergodic theorem covers it
bool linear_lead(const hardy::HardyExpr& a) {
    auto lt = hardy::leading_term(a);
    return lt && lt->key.p == Rational(1) && lt->key.q.is_zero();
}

// [a(n)] for n = first .. last as a flat vector
std::vector<std::int64_t> powers(const hardy::HardyExpr& a, std::uint64_t first, std::uint64_t last) {
    hardy::FloorEvaluator ev(a);
    return kern::floor_values(ev, first, last);
}

// first n where a can be evaluated: 1, or 2 when log t sits in a denominator
std::uint64_t first_index(const hardy::HardyExpr& a) {
    try {
        hardy::floor_eval(a, 1);
        return 1;
    } catch (const DomainError&) {
        return 2;
    }
}

struct Prepared {
    std::vector<std::vector<std::int64_t>> pw;
    std::vector<kern::MultiTerm> terms;
};

Prepared prepare(const AverageExperiment& exp, std::uint64_t len) {
    Prepared p;
    for (auto& a : exp.a) p.pw.push_back(powers(a, 1, len));
    for (size_t i = 0; i < exp.ell(); ++i)
        p.terms.push_back({&exp.system.transforms[exp.transform_of(i)], &exp.f[i], &p.pw[i]});
    return p;
}

}  // namespace

std::string failure_name(Failure f) {
    switch (f) {
        case Failure::None: return "none";
        case Failure::IntegerExponent: return "integer exponent";
        case Failure::EqualGrowth: return "equal growth";
        case Failure::Noncommuting: return "noncommuting";
    }
    return "?";
}

Failure parse_failure(const std::string& s) {
    for (auto f : {Failure::None, Failure::IntegerExponent, Failure::EqualGrowth, Failure::Noncommuting})
        if (failure_name(f) == s) return f;
    throw ParseError("parse_failure", "unknown hypothesis '" + s + "'");
}

void AverageExperiment::validate() const {
    system.validate();
    if (a.empty() || f.size() != a.size()) throw DomainError("AverageExperiment", "need one observable per iterate");
    if (!transform.empty() && transform.size() != a.size())
        throw DomainError("AverageExperiment", "need one transform index per iterate");
    for (size_t i = 0; i < a.size(); ++i) {
        if (transform_of(i) >= system.transforms.size())
            throw DomainError("AverageExperiment", "transform index out of range");
        f[i].validate(system.dim(), system.modulus());
    }
    check_schedule(schedule, "AverageExperiment");
    bool in_g = true;
    bool integer_exp = false;
    for (auto& e : a) {
        in_g = in_g && (hardy::in_class_G(e) || linear_lead(e));
        integer_exp = integer_exp || integer_power_above_one(e);
    }
    bool diff = a.size() == 1 || hardy::different_growth(a);
    switch (out_of_regime) {
        case Failure::None:
            if (!in_g) throw DomainError("AverageExperiment", "iterate outside G in a theorem-regime experiment");
            if (!diff) throw DomainError("AverageExperiment", "iterates without different growth in a theorem-regime experiment");
            break;
        case Failure::IntegerExponent:
            if (!integer_exp) throw DomainError("AverageExperiment", "declared integer-exponent failure but no iterate is t^k, k >= 2");
            break;
        case Failure::EqualGrowth:
            if (diff) throw DomainError("AverageExperiment", "declared equal-growth failure but growth rates differ");
            break;
        case Failure::Noncommuting:
            throw DomainError("AverageExperiment", "noncommuting transforms cannot be simulated on a shared space");
    }
}

std::vector<ScheduleRow> multi_average(const AverageExperiment& exp) {
    exp.validate();
    auto t0 = Clock::now();
    auto pts = dyn::sample_points(exp.system);
    auto prep = prepare(exp, static_cast<std::uint64_t>(exp.schedule.back()));
    long mod = exp.system.modulus();
    std::vector<cplx> acc(pts.size());
    std::vector<ScheduleRow> rows;
    size_t done = 0;
    for (long N : exp.schedule) {
        auto part = kern::multi_sum(prep.terms, pts, done, static_cast<size_t>(N), mod);
        done = static_cast<size_t>(N);
        ScheduleRow r;
        r.N = N;
        for (size_t s = 0; s < pts.size(); ++s) {
            acc[s] += part[s];
            r.values.push_back(acc[s] / static_cast<double>(N));
            r.mean_abs += std::abs(r.values.back()) / static_cast<double>(pts.size());
        }
        r.seconds = since(t0);
        rows.push_back(std::move(r));
    }
    return rows;
}

ExperimentReport limit_formula_report(const AverageExperiment& exp, double tolerance) {
    ExperimentReport rep;
    rep.rows = multi_average(exp);
    rep.tag = exp.out_of_regime == Failure::None ? "theorem-regime" : "out-of-regime: " + failure_name(exp.out_of_regime);
    rep.seed = exp.system.samples.seed;
    auto pts = dyn::sample_points(exp.system);
    rep.samples = pts.size();
    rep.target.assign(pts.size(), cplx(1));
    for (size_t i = 0; i < exp.ell(); ++i) {
        size_t t = exp.transform_of(i);
        auto orc = dyn::conditional_oracle(exp.system, t, exp.f[i], pts);
        if (!orc) {
            rep.target_exact = false;
            orc = dyn::conditional_expectation(exp.system, t, exp.f[i], exp.schedule.back()).birkhoff;
        }
        for (size_t s = 0; s < pts.size(); ++s) rep.target[s] *= (*orc)[s];
    }
    for (auto& v : rep.target) rep.target_abs += std::norm(v) / static_cast<double>(pts.size());
    rep.target_abs = std::sqrt(rep.target_abs);
    for (auto& row : rep.rows) {
        double d = 0;
        for (size_t s = 0; s < pts.size(); ++s) d += std::norm(row.values[s] - rep.target[s]);
        row.distance = std::sqrt(d / static_cast<double>(pts.size()));
    }
    long Nmax = exp.schedule.back();
    rep.tolerance = tolerance > 0 ? tolerance : 10 / std::sqrt(static_cast<double>(Nmax));
    size_t n = rep.rows.size();
    rep.tail_nonincreasing = n >= 3;
    for (size_t i = n >= 3 ? n - 3 : 0; i + 1 < n; ++i)
        rep.tail_nonincreasing = rep.tail_nonincreasing && rep.rows[i + 1].distance <= rep.rows[i].distance;
    bool small = rep.rows.back().distance < rep.tolerance;
    rep.consistent = small && rep.tail_nonincreasing;
    std::ostringstream v;
    if (rep.consistent) v << "consistent";
    else if (n < 3) v << "undecided: fewer than three schedule points";
    else if (!small) v << "inconsistent: distance " << rep.rows.back().distance << " above tolerance " << rep.tolerance;
    else v << "inconsistent: distance increased over the schedule tail";
    rep.verdict = v.str();
    return rep;
}

RecurrenceReport recurrence_report(const dyn::System& sys, const dyn::Observable& A, const std::vector<hardy::HardyExpr>& a,
                                   const std::vector<long>& schedule, const std::vector<size_t>& transform) {
    sys.validate();
    check_schedule(schedule, "recurrence_report");
    if (a.empty()) throw DomainError("recurrence_report", "no iterates");
    if (std::holds_alternative<dyn::FourierSeries>(A.kind))
        throw DomainError("recurrence_report", "the set A must be a box or a 0/1 table");
    long mod = sys.modulus();
    A.validate(sys.dim(), mod);
    if (!transform.empty() && transform.size() != a.size())
        throw DomainError("recurrence_report", "need one transform index per iterate");
    auto t_of = [&](size_t i) { return transform.empty() ? i : transform[i]; };
    for (size_t i = 0; i < a.size(); ++i) {
        if (t_of(i) >= sys.transforms.size()) throw DomainError("recurrence_report", "transform index out of range");
        if (!hardy::in_class_G(a[i]) && !linear_lead(a[i])) throw DomainError("recurrence_report", "iterate outside G");
    }
    if (a.size() > 1 && !hardy::different_growth(a)) throw DomainError("recurrence_report", "growth rates must differ");

    auto t0 = Clock::now();
    RecurrenceReport rep;
    rep.seed = sys.samples.seed;
    rep.exact = sys.cyclic() && sys.samples.kind == dyn::SampleSpec::Kind::AllResidues;
    rep.measure = A.integral(sys.dim(), mod).real();
    rep.bound = std::pow(rep.measure, static_cast<double>(a.size() + 1));
    auto pts = dyn::sample_points(sys);
    rep.samples = pts.size();
    std::vector<std::vector<std::int64_t>> pw;
    for (auto& e : a) pw.push_back(powers(e, 1, static_cast<std::uint64_t>(schedule.back())));
    std::vector<kern::MultiTerm> terms;
    for (size_t i = 0; i < a.size(); ++i) terms.push_back({&sys.transforms[t_of(i)], &A, &pw[i]});
    std::vector<double> acc(pts.size());
    size_t done = 0;
    for (long N : schedule) {
        auto part = kern::multi_sum(terms, pts, done, static_cast<size_t>(N), mod, &A);
        done = static_cast<size_t>(N);
        double S = static_cast<double>(pts.size()), m = 0, m2 = 0;
        for (size_t s = 0; s < pts.size(); ++s) {
            acc[s] += part[s].real();
            double y = acc[s] / static_cast<double>(N);
            m += y / S;
            m2 += y * y / S;
        }
        RecurrenceRow row{N, m, 0, since(t0)};
        if (!rep.exact && pts.size() > 1) row.std_error = std::sqrt(std::max(0.0, m2 - m * m) * S / (S - 1) / S);
        rep.rows.push_back(row);
    }
    rep.holds = rep.rows.back().estimate >= rep.bound - 3 * rep.rows.back().std_error;
    return rep;
}

BlockReport block_average_check(const AverageExperiment& exp, const std::vector<long>& R_schedule, long N) {
    exp.validate();
    check_schedule(R_schedule, "block_average_check");
    if (N < 1) throw DomainError("block_average_check", "N must be positive");
    long Rmax = R_schedule.back();
    std::uint64_t len = static_cast<std::uint64_t>(Rmax) * static_cast<std::uint64_t>(N + 1);
    auto prep = prepare(exp, len);
    auto pts = dyn::sample_points(exp.system);
    long mod = exp.system.modulus();
    std::vector<cplx> target(pts.size(), cplx(1));
    for (size_t i = 0; i < exp.ell(); ++i) {
        auto orc = dyn::conditional_oracle(exp.system, exp.transform_of(i), exp.f[i], pts);
        if (!orc) throw DomainError("block_average_check", "needs exact conditional expectations");
        for (size_t s = 0; s < pts.size(); ++s) target[s] *= (*orc)[s];
    }
    BlockReport rep;
    rep.N = N;
    for (long R : R_schedule) rep.rows.push_back({R, 0});
    for (size_t s = 0; s < pts.size(); ++s) {
        // F(m) at index m - 1
        auto F = kern::term_values(prep.terms, pts[s], 0, static_cast<size_t>(len), mod);
        std::vector<cplx> prefix(F.size() + 1);
        for (size_t i = 0; i < F.size(); ++i) prefix[i + 1] = prefix[i] + F[i];
        for (auto& row : rep.rows) {
            double q = 0;
            for (long n = 1; n <= N; ++n) {
                size_t lo = static_cast<size_t>(row.R * n) - 1;  // F(Rn) .. F(Rn + R - 1)
                cplx block = (prefix[lo + row.R] - prefix[lo]) / static_cast<double>(row.R);
                q += std::abs(block - target[s]);
            }
            row.value += q / N / static_cast<double>(pts.size());
        }
    }
    rep.decreasing = true;
    for (size_t i = 1; i < rep.rows.size(); ++i) rep.decreasing = rep.decreasing && rep.rows[i].value < rep.rows[i - 1].value;
    // constant observables give exactly zero at every R
    if (std::all_of(rep.rows.begin(), rep.rows.end(), [](const BlockRow& r) { return r.value < 1e-12; })) rep.decreasing = true;
    return rep;
}

std::vector<ConstancyRow> block_constancy(const hardy::HardyExpr& a, long R, const std::vector<long>& schedule) {
    check_schedule(schedule, "block_constancy");
    if (R < 1) throw DomainError("block_constancy", "R must be positive");
    if (hardy::degree(a) != 0) throw DomainError("block_constancy", "needs a degree-zero iterate");
    std::uint64_t first = first_index(a);
    hardy::FloorEvaluator ev(a);
    std::vector<ConstancyRow> out;
    long good = 0, n = 0;
    for (long Nk : schedule) {
        // Hardy field functions are eventually monotone, so the block ends decide
        std::vector<std::uint64_t> idx;
        for (long m = n + 1; m <= Nk; ++m) {
            std::uint64_t base = std::max<std::uint64_t>(first, static_cast<std::uint64_t>(m) * R);
            idx.push_back(base);
            idx.push_back(static_cast<std::uint64_t>(m) * R + R - 1);
        }
        std::vector<std::int64_t> v(idx.size());
        for (size_t i = 0; i < idx.size(); ++i) v[i] = ev.small(idx[i]);
        for (size_t i = 0; i < v.size(); i += 2) good += v[i] == v[i + 1];
        n = Nk;
        out.push_back({Nk, static_cast<double>(good) / Nk});
    }
    return out;
}

SubsequenceReport subsequence_average_check(const hardy::HardyExpr& a, const dyn::Angle& beta, long N, double threshold) {
    if (N < 1) throw DomainError("subsequence_average_check", "N must be positive");
    if (hardy::compare_growth(a, hardy::HardyExpr::parse("log(t)")).rel != hardy::Relation::Greater ||
        hardy::compare_growth(a, hardy::HardyExpr::parse("t")).rel != hardy::Relation::Less)
        throw DomainError("subsequence_average_check", "needs log t < a < t");
    SubsequenceReport rep;
    rep.N = N;
    rep.threshold = threshold;
    rep.first = first_index(a);
    for (long long M : {0LL, 1000LL, 1000000LL, 1000000000LL, 1000000000000LL}) {
        std::complex<double> s = 0;
        dyn::Fix ph = dyn::mul(beta.fix(), M + 1);
        for (long n = 0; n < N; ++n, ph += beta.fix()) s += dyn::e(ph);
        rep.uniform_average = std::max(rep.uniform_average, std::abs(s) / static_cast<double>(N));
    }
    auto v = powers(a, rep.first, rep.first + static_cast<std::uint64_t>(N) - 1);
    rep.subsequence_average = std::abs(kern::weyl_sum(v, 0, v.size(), beta.fix(), 1)) / static_cast<double>(N);
    rep.both_small = rep.uniform_average <= threshold && rep.subsequence_average <= threshold;
    return rep;
}

ParityRuns parity_runs(const hardy::HardyExpr& a, long N) {
    if (N < 1) throw DomainError("parity_runs", "N must be positive");
    std::uint64_t first = first_index(a);
    auto v = powers(a, first, static_cast<std::uint64_t>(N));
    ParityRuns r;
    r.N = N;
    long run = 0;
    int prev = -1;
    for (size_t i = 0; i < v.size(); ++i) {
        int p = static_cast<int>(((v[i] % 2) + 2) % 2);
        run = p == prev ? run + 1 : 1;
        prev = p;
        if (run > r.longest) {
            r.longest = run;
            r.start = first + i + 1 - run;
            r.parity = p;
        }
    }
    return r;
}

}  // namespace ergolab::avg
