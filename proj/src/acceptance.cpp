#include "ergolab/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>

#include "ergolab/averages.hpp"
#include "ergolab/equidistribution.hpp"
#include "ergolab/errors.hpp"
#include "ergolab/family.hpp"
#include "ergolab/patterns.hpp"
#include "ergolab/sampler.hpp"

namespace ergolab::acc {

namespace {

using hardy::HardyExpr;
using dyn::Angle;
using dyn::Observable;
using dyn::cplx;

HardyExpr P(const char* s) { return HardyExpr::parse(s); }

const std::map<std::uint32_t, mpq_class> kNoH;

std::string fmt(double x, int prec = 4) {
    std::ostringstream o;
    o << std::setprecision(prec) << x;
    return o.str();
}

// ---- 1, 2, 3: reduction ----

void type_matrix_exact(Result& r) {
    auto f = reduction::parse_family(
        "[(t^2.5, t^3.5); (t^2.5 + t^2, t); (t^2.5 + t^1.5, 2*t); (t^0.5, t); ((t+1)^0.5 - t^0.5, t^1.5); (0, t^0.5)]");
    auto w = reduction::type_matrix(f);
    r.property = w.w == std::vector<std::vector<int>>{{0, 2, 0, 1}, {0, 0, 1, 1}};
    r.detail = "type " + w.str();
}

void worked_trace(Result& r) {
    auto tr = reduction::reduce_fully(reduction::parse_family("[(t^1.5, 0); (0, t^1.1)]"));
    std::ostringstream d;
    bool ok = tr.steps.size() == 3;
    if (ok) {
        const char* types[] = {"(1 0 / 1 0)", "(1 0 / 0 1)", "(1 0 / 0 0)", "(0 7 / 0 0)"};
        size_t pairs[] = {3, 4, 7};
        reduction::Tuple anchors[] = {{HardyExpr(), P("t^1.1")},
                                      {HardyExpr(), P("(t+h1)^1.1 - t^1.1")},
                                      {P("t^1.5"), P("-(t+h1)^1.1")}};
        ok = tr.steps[0].type_before.str() == types[0];
        for (size_t i = 0; i < 3; ++i) {
            ok = ok && tr.steps[i].type_after.str() == types[i + 1] && tr.steps[i].after.m() == pairs[i] &&
                 tr.steps[i].anchor.coords == anchors[i];
            d << (i ? "; " : "") << tr.steps[i].type_after.str() << " m=" << tr.steps[i].after.m() << " anchor "
              << reduction::format_tuple(tr.steps[i].anchor.coords);
        }
        ok = ok && tr.sound();
    }
    r.property = ok;
    r.detail = std::to_string(tr.steps.size()) + " steps: " + d.str();
}

void reduction_sweep(Result& r) {
    sampler::Rng rng(20240601);
    const int total = 500;
    int terminated = 0, unsound = 0, budget = 0, steps = 0;
    for (int i = 0; i < total; ++i) {
        auto f = sampler::random_nice_family(rng, {3, 3, 3});
        try {
            auto tr = reduction::reduce_fully(f, {64, 64, false});
            ++terminated;
            unsound += !tr.sound();
        } catch (const reduction::TupleBudgetExceeded& e) {
            ++budget;
            for (auto& s : e.partial.steps) unsound += !(s.decreased && s.nice_after.nice);
        } catch (const reduction::MaxStepsExceeded&) {
            ++steps;
        }
    }
    r.property = terminated == total && unsound == 0;
    r.detail = std::to_string(terminated) + "/" + std::to_string(total) + " terminated, " + std::to_string(budget) +
               " over the 64-tuple budget, " + std::to_string(steps) + " over 64 steps, " + std::to_string(unsound) +
               " unsound steps (seed 20240601)";
}

// ---- 4: growth lemmas ----

struct Numeric {
    int failures = 0;
    // a ~ r b: within 10% at 1e12 and no further from r than at 1e6
    void similar(const HardyExpr& a, const HardyExpr& b, const hardy::GrowthComparison& g) {
        auto ratio = g.ratio();
        if (!ratio) {
            ++failures;
            return;
        }
        double r = ratio->get_d();
        double e6 = std::abs(hardy::evaluate_ratio(a, b, "1e6", kNoH) / r - 1);
        double e12 = std::abs(hardy::evaluate_ratio(a, b, "1e12", kNoH) / r - 1);
        failures += !(e12 < 0.10 && e12 <= std::max(e6, 1e-3));
    }
    // a < b: |a/b| shrinks from 1e6 to 1e12
    void less(const HardyExpr& a, const HardyExpr& b) {
        double r6 = std::abs(hardy::evaluate_ratio(a, b, "1e6", kNoH));
        double r12 = std::abs(hardy::evaluate_ratio(a, b, "1e12", kNoH));
        failures += !(r12 < std::max(r6, 1e-6));
    }
};

HardyExpr over_t(const HardyExpr& e, int k) { return hardy::multiply_monomial(e, Rational(-k), Rational(0)); }

bool above_t_eps(const HardyExpr& e) {
    auto lt = hardy::leading_term(e);
    return lt && lt->key.p > Rational(0);
}

int uniform(sampler::Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

int shift_combo_suite(Numeric& num) {
    sampler::Rng rng(101);
    int bad = 0;
    for (int trial = 0; trial < 200; ++trial) {
        int d = uniform(rng, 0, 3);
        HardyExpr a = sampler::random_G(rng, d);
        std::vector<hardy::ShiftCombo> combo;
        for (int i = uniform(rng, 1, 4); i > 0; --i) combo.push_back({uniform(rng, -3, 3), uniform(rng, 0, 4)});
        auto cc = hardy::shift_combo_coeffs(a, combo);
        HardyExpr b = hardy::apply_combo(a, combo);
        if (cc.vanishing) {
            if (!b.is_zero()) bad += hardy::compare_growth(b, over_t(a, d)).rel != hardy::Relation::Less;
            continue;
        }
        HardyExpr ref = over_t(a, cc.first_nonzero);
        auto g = hardy::compare_growth(b, ref);
        if (g.rel != hardy::Relation::Similar) ++bad;
        else num.similar(b, ref, g);
    }
    return bad;
}

int dominated_suite(Numeric& num) {
    sampler::Rng rng(202);
    int done = 0, bad = 0;
    while (done < 200) {
        HardyExpr a = sampler::random_G(rng, uniform(rng, 0, 3));
        HardyExpr a1 = sampler::random_shift_combo(rng, a);
        HardyExpr a2 = sampler::random_shift_combo(rng, a);
        if (!above_t_eps(a1) || a2.is_zero()) continue;
        if (hardy::leading_term(a2)->key > hardy::leading_term(a1)->key || hardy::equivalent(a1, a2)) continue;
        ++done;
        for (long h = 1; h <= 5; ++h) {
            HardyExpr x = a1.shifted(ShiftPoly(h)) - a2;
            auto g = hardy::compare_growth(x, a1);
            if (g.rel != hardy::Relation::Similar) ++bad;
            else if (h == 1 || h == 5) num.similar(x, a1, g);
        }
        bad += hardy::compare_growth(a1.shifted(ShiftPoly::symbol(1)) - a2, a1).rel != hardy::Relation::Similar;
    }
    return bad;
}

int equivalent_suite(Numeric& num) {
    sampler::Rng rng(303);
    int done = 0, bad = 0;
    while (done < 200) {
        HardyExpr a = sampler::random_G(rng, uniform(rng, 1, 3));
        HardyExpr a1 = sampler::random_shift_combo(rng, a);
        if (hardy::degree(a1) < 1) continue;
        HardyExpr a2 = uniform(rng, 0, 1) ? a1.shifted(ShiftPoly(static_cast<long>(uniform(rng, 1, 3))))
                                          : a1 + a.shifted(ShiftPoly(2)) - a.shifted(ShiftPoly(1));
        if (!hardy::equivalent(a1, a2)) continue;
        ++done;
        auto lt = hardy::leading_term(a1);
        HardyExpr bound = HardyExpr::monomial(lt->coef, lt->key.p - Rational(1), lt->key.q);
        int similar = 0, tested = 0;
        for (long h = 0; h <= 5; ++h) {
            HardyExpr x = a1.shifted(ShiftPoly(h)) - a2;
            if (x.is_zero()) continue;
            ++tested;
            auto g = hardy::compare_growth(x, bound);
            if (g.rel == hardy::Relation::Greater) ++bad;
            else if (g.rel == hardy::Relation::Similar) {
                ++similar;
                num.similar(x, bound, g);
            } else {
                num.less(x, bound);
            }
        }
        bad += similar < tested - 1;
    }
    return bad;
}

int derivative_suite(Numeric& num) {
    sampler::Rng rng(404);
    int done = 0, bad = 0;
    while (done < 200) {
        HardyExpr a = sampler::random_G(rng, uniform(rng, 0, 3));
        if (!above_t_eps(a)) continue;
        ++done;
        HardyExpr ref = over_t(a, 1);
        auto g = hardy::compare_growth(hardy::derivative(a), ref);
        if (g.rel != hardy::Relation::Similar) ++bad;
        else num.similar(hardy::derivative(a), ref, g);
        for (long h = 1; h <= 5; h += 2) {
            HardyExpr x = a.shifted(ShiftPoly(h)) - a;
            auto gs = hardy::compare_growth(x, ref);
            if (gs.rel != hardy::Relation::Similar) ++bad;
            else num.similar(x, ref, gs);
        }
    }
    return bad;
}

void hardy_lemmas(Result& r) {
    std::ostringstream d;
    bool ok = true;
    std::pair<const char*, int (*)(Numeric&)> suites[] = {{"shift combos", shift_combo_suite},
                                                          {"dominated difference", dominated_suite},
                                                          {"equivalent difference", equivalent_suite},
                                                          {"derivative", derivative_suite}};
    for (auto& [name, fn] : suites) {
        Numeric num;
        int bad = fn(num);
        ok = ok && bad == 0 && num.failures == 0;
        d << (d.tellp() ? "; " : "") << name << ": " << bad << " symbolic, " << num.failures << " numeric failures";
    }
    r.property = ok;
    r.detail = "200 instances each: " + d.str();
}

// ---- 5, 6, 7: averages ----

dyn::System two_rotations(size_t samples) {
    dyn::System s;
    s.transforms = {dyn::TransformSpec::rotation({Angle::parse("sqrt(2)")}),
                    dyn::TransformSpec::rotation({Angle::parse("sqrt(3)")})};
    s.samples = {dyn::SampleSpec::Kind::LowDiscrepancy, samples, 1};
    return s;
}

void limit_formula(Result& r) {
    avg::AverageExperiment e;
    e.system = two_rotations(16);
    e.f = {Observable::fourier({{{1}, {1, 0}}, {{-2}, {0, 0.3}}, {{3}, {0.2, 0.2}}}),
           Observable::fourier({{{1}, {0.5, 0}}, {{2}, {0, 0.5}}})};
    e.a = {P("t^1.5"), P("t^1.1")};
    e.schedule = {10000, 100000, 1000000};
    auto rep = avg::limit_formula_report(e, 0.02);
    double last = rep.rows.back().distance;
    bool mono = rep.rows[1].distance <= rep.rows[0].distance && rep.rows[2].distance <= rep.rows[1].distance;
    r.property = last <= 0.02 && mono && rep.target_abs == 0;
    std::ostringstream d;
    d << "L2 distance";
    for (auto& row : rep.rows) d << " " << fmt(row.distance) << " (N=" << row.N << ")";
    d << "; 16 points";
    r.detail = d.str();
}

void integer_exponent(Result& r) {
    avg::AverageExperiment e;
    e.system = dyn::System{{dyn::TransformSpec::cyclic(3, 1)}, {dyn::SampleSpec::Kind::AllResidues, 3, 1}};
    e.f = {Observable::cyclic_character(3, 1)};
    e.a = {P("t^2")};
    e.schedule = {1000000};
    e.out_of_regime = avg::Failure::IntegerExponent;
    auto rep = avg::limit_formula_report(e);
    double v = rep.rows.back().mean_abs, want = 1 / std::sqrt(3.0);
    r.property = std::abs(v - want) <= 0.01 && rep.target_abs < 1e-12;
    r.detail = "|avg| = " + fmt(v, 8) + " vs 3^-1/2 = " + fmt(want, 8) + ", projection norm " + fmt(rep.target_abs);
}

void recurrence_floor(Result& r) {
    auto rep = avg::recurrence_report(two_rotations(2048), Observable::box({{0, 0.3}}), {P("t^1.5"), P("t^1.1")},
                                      {10000, 100000, 1000000});
    auto& last = rep.rows.back();
    r.property = rep.holds;
    r.detail = "estimate " + fmt(last.estimate) + " +- " + fmt(last.std_error) + " vs 0.3^3 = " + fmt(rep.bound) +
               " (2048 points)";
}

// ---- 8: Weyl sums ----

void weyl_decay(Result& r) {
    auto seq = equi::floor_seq(P("t^1.5"), 1000000);
    auto w = equi::weyl_sum(seq, Angle::parse("sqrt(2)"), 1, {10000, 1000000});
    std::vector<double> pts;
    dyn::Fix a = Angle::parse("sqrt(2)").fix();
    for (size_t i = 0; i < 100000; ++i) pts.push_back(dyn::to_double(dyn::mul(a, seq.values[i])));
    double disc = equi::star_discrepancy(pts);
    double factor = w.magnitudes[0] / w.magnitudes[1];
    r.property = factor >= 3 && disc <= 0.01;
    r.detail = "|S_N| " + fmt(w.magnitudes[0]) + " -> " + fmt(w.magnitudes[1]) + " (factor " + fmt(factor) +
               "), star discrepancy " + fmt(disc);
}

// ---- 9: seminorm oracle ----

void seminorm_oracle(Result& r) {
    dyn::System sys{{dyn::TransformSpec::rotation({Angle::parse("sqrt(2)")})}, {dyn::SampleSpec::Kind::Uniform, 4, 21}};
    auto f = Observable::fourier(
        {{{1}, {0.5, 0.1}}, {{2}, {-0.3, 0.2}}, {{-3}, {0.25, 0}}, {{5}, {0, -0.4}}, {{7}, {0.1, 0.1}}});
    auto s = dyn::ghk_seminorm(sys, 0, f, 2, {10000});
    double rel = std::abs(s.values[0] / *s.oracle - 1);
    double s4 = std::pow(s.values[0], 4);
    auto x = dyn::sample_points(sys)[0];
    auto d = dyn::dual_sequence(sys.transforms[0], f, 2, x, 2000, 0, 2000);
    cplx corr = dyn::dual_correlation(sys.transforms[0], f, d, x);
    double drel = std::abs(corr / s4 - 1.0);
    r.property = rel < 0.05 && drel < 0.05;
    r.detail = "seminorm " + fmt(s.values[0]) + " vs oracle " + fmt(*s.oracle) + " (" + fmt(100 * rel, 3) +
               "%), dual correlation off by " + fmt(100 * drel, 3) + "%";
}

// ---- 10: vdC ----

void vdc_families(Result& r) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0, 1);
    int bad = 0;
    double worst = -1e300;
    for (int fam = 0; fam < 1000; ++fam) {
        size_t dim = 1 + rng() % 3;
        long N = 20 + static_cast<long>(rng() % 1500);
        long H = 1 + static_cast<long>(rng() % static_cast<unsigned long>(N));
        int kind = static_cast<int>(rng() % 3);
        double alpha = u(rng);
        std::vector<std::vector<cplx>> v(static_cast<size_t>(N), std::vector<cplx>(dim));
        for (long n = 0; n < N; ++n) {
            double norm = 0;
            for (auto& c : v[static_cast<size_t>(n)]) {
                if (kind == 0) c = cplx(u(rng) - 0.5, u(rng) - 0.5);
                else if (kind == 1) c = std::polar(1.0, 6.283185307179586 * alpha * static_cast<double>(n) * n);
                else c = cplx(rng() & 1 ? 1.0 : -1.0);
                norm += std::norm(c);
            }
            double scale = u(rng) / std::sqrt(norm);
            if (kind != 0) scale = 1 / std::sqrt(norm);
            for (auto& c : v[static_cast<size_t>(n)]) c *= scale;
        }
        auto rep = dyn::vdc_inequality_check(v, H);
        worst = std::max(worst, rep.lhs - rep.rhs);
        bad += rep.lhs > rep.rhs + 1e-9;
    }
    r.property = bad == 0;
    r.detail = std::to_string(1000 - bad) + "/1000 families hold, max lhs - rhs = " + fmt(worst);
}

// ---- 11: parity runs ----

void parity(Result& r) {
    auto p = avg::parity_runs(P("t^1.5"), 1000000);
    r.property = p.longest >= 5;
    r.detail = "longest run " + std::to_string(p.longest) + " of " + (p.parity ? "odd" : "even") + " values from n = " +
               std::to_string(p.start);
}

// ---- 12: patterns ----

void pattern_witnesses(Result& r) {
    auto E = pat::DenseSet::random(2, 500, 0.6, 20240601);
    std::vector<pat::Vec> vecs{{1, 0}, {0, 1}};
    std::vector<HardyExpr> a{P("t^1.5"), P("t^1.1")};
    auto c = pat::find_multidim_config(E, vecs, a, 1, 30, 1);
    bool verified = false;
    if (!c.witnesses.empty()) {
        auto& w = c.witnesses[0];
        std::int64_t p1 = hardy::floor_eval(a[0], static_cast<std::uint64_t>(w.n)).get_si();
        std::int64_t p2 = hardy::floor_eval(a[1], static_cast<std::uint64_t>(w.n)).get_si();
        verified = E.contains(w.v) && E.contains({w.v[0] + p1, w.v[1]}) && E.contains({w.v[0], w.v[1] + p2});
    }
    long L = 100000;
    std::vector<pat::SyndeticSet> S{pat::SyndeticSet::progression(1, 2, L), pat::SyndeticSet::progression(3, 3, L),
                                    pat::SyndeticSet::progression(1, 5, L)};
    auto s = pat::syndetic_system_solve(S, 2, {3, 1}, a, 1, 1000);
    bool sys_ok = false;
    if (s.found) {
        std::int64_t p1 = hardy::floor_eval(a[0], static_cast<std::uint64_t>(s.n)).get_si();
        std::int64_t p2 = hardy::floor_eval(a[1], static_cast<std::uint64_t>(s.n)).get_si();
        sys_ok = S[0].contains(s.x[0]) && S[1].contains(s.x[1]) && S[2].contains(s.x[2]) &&
                 3 * s.x[1] - 2 * s.x[0] == p1 && s.x[2] - 2 * s.x[0] == p2;
    }
    r.property = verified && sys_ok;
    std::ostringstream d;
    d << c.total << " configurations in the density-" << fmt(E.density().get_d()) << " set";
    if (!c.witnesses.empty()) d << " (first v=(" << c.witnesses[0].v[0] << "," << c.witnesses[0].v[1] << ") n=" << c.witnesses[0].n << ")";
    if (s.found) d << "; 3x1 - 2x0 = [n^1.5], x2 - 2x0 = [n^1.1] solved by x=(" << s.x[0] << "," << s.x[1] << "," << s.x[2] << ") n=" << s.n;
    else d << "; " << s.note;
    r.detail = d.str();
}

struct Entry {
    const char* title;
    double limit;
    void (*fn)(Result&);
};

const Entry kEntries[kCriteria] = {
    {"type matrix of the worked family", 1, type_matrix_exact},
    {"worked vdC trace", 1, worked_trace},
    {"reduction soundness sweep", 60, reduction_sweep},
    {"growth lemma property suite", 60, hardy_lemmas},
    {"limit formula, theorem regime", 120, limit_formula},
    {"integer-exponent failure", 30, integer_exponent},
    {"recurrence floor", 120, recurrence_floor},
    {"Weyl decay and discrepancy", 60, weyl_decay},
    {"seminorm oracle and dual correlation", 120, seminorm_oracle},
    {"vdC inequality", 30, vdc_families},
    {"parity runs", 30, parity},
    {"pattern witnesses", 120, pattern_witnesses},
};

}  // namespace

std::string Result::line() const {
    std::ostringstream o;
    o << (pass() ? "PASS" : "FAIL") << "  " << std::setw(2) << id << "  " << title << ": " << detail << " ["
      << std::fixed << std::setprecision(1) << seconds << " s, limit " << limit << " s]";
    if (property && !pass()) o << " (over time)";
    return o.str();
}

Result run(int id) {
    if (id < 1 || id > kCriteria) throw DomainError("acceptance", "criterion id must be in 1..12");
    const Entry& e = kEntries[id - 1];
    Result r;
    r.id = id;
    r.title = e.title;
    r.limit = e.limit;
    auto t0 = std::chrono::steady_clock::now();
    try {
        e.fn(r);
    } catch (const std::exception& ex) {
        r.property = false;
        r.detail = std::string("error: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::vector<Result> run_all(const std::vector<int>& ids) {
    std::vector<Result> out;
    if (ids.empty())
        for (int i = 1; i <= kCriteria; ++i) out.push_back(run(i));
    else
        for (int i : ids) out.push_back(run(i));
    return out;
}

}  // namespace ergolab::acc
