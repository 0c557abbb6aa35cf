#include <cmath>

#include "doctest.h"
#include "ergolab/averages.hpp"
#include "ergolab/errors.hpp"

using namespace ergolab;
using namespace ergolab::avg;
using dyn::Angle;
using dyn::Observable;
using dyn::SampleSpec;
using dyn::System;
using dyn::TransformSpec;
using hardy::HardyExpr;

namespace {

const double kTau = 6.283185307179586476925286766559;

HardyExpr P(const char* s) { return HardyExpr::parse(s); }

System rotations(std::vector<const char*> alphas, size_t samples = 16) {
    System s;
    for (auto a : alphas) s.transforms.push_back(TransformSpec::rotation({Angle::parse(a)}));
    s.samples = {SampleSpec::Kind::LowDiscrepancy, samples, 1};
    return s;
}

AverageExperiment two_rotations(std::vector<long> schedule) {
    AverageExperiment e;
    e.system = rotations({"sqrt(2)", "sqrt(3)"});
    e.f = {Observable::character({1}), Observable::character({1})};
    e.a = {P("t^1.5"), P("t^1.1")};
    e.schedule = std::move(schedule);
    return e;
}

AverageExperiment cyclic_squares() {
    AverageExperiment e;
    e.system = System{{TransformSpec::cyclic(3, 1)}, {SampleSpec::Kind::AllResidues, 3, 1}};
    e.f = {Observable::cyclic_character(3, 1)};
    e.a = {P("t^2")};
    e.schedule = {1000, 10000, 100000};
    e.out_of_regime = Failure::IntegerExponent;
    return e;
}

}  // namespace

TEST_CASE("multi_average: linear iterate is a geometric sum") {
    AverageExperiment e;
    e.system = rotations({"sqrt(2)"}, 4);
    e.f = {Observable::character({1})};
    e.a = {P("t")};
    e.schedule = {100, 1000, 10000};
    auto rows = multi_average(e);
    double bound = 2 / std::abs(std::complex<double>(1) - std::polar(1.0, kTau * std::sqrt(2.0)));
    for (auto& r : rows)
        for (auto& v : r.values) CHECK(std::abs(v) <= bound / r.N + 1e-12);
}

TEST_CASE("multi_average: t^1.5 on sqrt(2) decays") {
    AverageExperiment e;
    e.system = rotations({"sqrt(2)"}, 4);
    e.f = {Observable::character({1})};
    e.a = {P("t^1.5")};
    e.schedule = {10000, 1000000};
    auto rows = multi_average(e);
    CHECK(rows[1].mean_abs < rows[0].mean_abs);
    CHECK(rows[1].mean_abs < 0.01);
}

TEST_CASE("multi_average agrees with a direct loop") {
    auto e = two_rotations({300});
    e.system.samples.count = 3;
    auto rows = multi_average(e);
    auto pts = dyn::sample_points(e.system);
    double r2 = std::sqrt(2.0), r3 = std::sqrt(3.0);
    for (size_t s = 0; s < pts.size(); ++s) {
        double x = dyn::to_double(pts[s][0]);
        std::complex<double> acc = 0;
        for (long n = 1; n <= 300; ++n) {
            double p1 = std::floor(std::pow(n, 1.5)), p2 = std::floor(std::pow(n, 1.1));
            acc += std::polar(1.0, kTau * (x + p1 * r2)) * std::polar(1.0, kTau * (x + p2 * r3));
        }
        CHECK(std::abs(rows[0].values[s] - acc / 300.0) < 1e-8);
    }
}

TEST_CASE("limit formula: theorem regime") {
    auto r = limit_formula_report(two_rotations({1000, 10000, 100000, 1000000}));
    CHECK(r.tag == "theorem-regime");
    CHECK(r.target_exact);
    CHECK(r.target_abs == 0);
    CHECK(r.tolerance == doctest::Approx(0.01));
    CHECK(r.rows.back().distance < r.rows.front().distance);
    CHECK(r.rows.back().distance < r.tolerance);
    CHECK(r.samples == 16);
}

TEST_CASE("limit formula: trigonometric polynomials") {
    auto e = two_rotations({1000, 10000, 100000, 1000000});
    e.f = {Observable::fourier({{{0}, {0.5, 0}}, {{1}, {1, 0}}, {{-2}, {0, 0.3}}}),
           Observable::fourier({{{0}, {1, 0}}, {{3}, {0.2, 0}}})};
    auto r = limit_formula_report(e);
    CHECK(r.target_abs == doctest::Approx(0.5));
    CHECK(r.rows.back().distance < 0.01);
    CHECK(r.rows.back().distance < r.rows.front().distance);
}

TEST_CASE("limit formula: constants give distance zero") {
    auto e = two_rotations({100, 1000, 10000});
    e.f = {Observable::constant(1, 1), Observable::constant(1, 1)};
    auto r = limit_formula_report(e);
    for (auto& row : r.rows) CHECK(row.distance == 0);
    CHECK(r.consistent);
}

TEST_CASE("limit formula: squares mod 3 miss the projection") {
    auto r = limit_formula_report(cyclic_squares());
    CHECK(r.tag == "out-of-regime: integer exponent");
    CHECK(r.target_abs < 1e-12);
    for (auto& row : r.rows) CHECK(row.distance > 0.5);
    CHECK(std::abs(r.rows.back().mean_abs - 1 / std::sqrt(3.0)) < 1e-3);
    CHECK(!r.consistent);
}

TEST_CASE("experiment validation") {
    auto e = cyclic_squares();
    e.out_of_regime = Failure::None;
    CHECK_THROWS_AS(e.validate(), DomainError);
    e.out_of_regime = Failure::EqualGrowth;
    CHECK_THROWS_AS(e.validate(), DomainError);
    auto g = two_rotations({10});
    g.out_of_regime = Failure::IntegerExponent;
    CHECK_THROWS_AS(g.validate(), DomainError);
    g.out_of_regime = Failure::None;
    g.a = {P("t^1.5"), P("2*t^1.5")};
    CHECK_THROWS_AS(g.validate(), DomainError);
    g.out_of_regime = Failure::EqualGrowth;
    CHECK_NOTHROW(g.validate());
    g.out_of_regime = Failure::Noncommuting;
    CHECK_THROWS_AS(g.validate(), DomainError);
    g = two_rotations({10, 5});
    CHECK_THROWS_AS(g.validate(), DomainError);
    CHECK(parse_failure("equal growth") == Failure::EqualGrowth);
    CHECK_THROWS_AS(parse_failure("bogus"), ParseError);
}

TEST_CASE("determinism") {
    auto a = limit_formula_report(two_rotations({1000, 5000}));
    auto b = limit_formula_report(two_rotations({1000, 5000}));
    for (size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].values == b.rows[i].values);
}

TEST_CASE("recurrence") {
    SUBCASE("half interval, one rotation") {
        auto r = recurrence_report(rotations({"sqrt(2)"}, 2048), Observable::box({{0, 0.5}}), {P("t^1.5")}, {1000, 10000});
        CHECK(r.measure == doctest::Approx(0.5));
        CHECK(r.bound == doctest::Approx(0.25));
        CHECK(r.holds);
        CHECK(r.rows.back().std_error > 0);
    }
    SUBCASE("whole space") {
        auto r = recurrence_report(rotations({"sqrt(2)"}, 64), Observable::box({{0, 1}}), {P("t^1.5")}, {1000});
        CHECK(r.rows[0].estimate == doctest::Approx(1));
        CHECK(r.bound == doctest::Approx(1));
        CHECK(r.holds);
    }
    SUBCASE("two rotations on one circle") {
        System s = rotations({"sqrt(2)", "sqrt(3)"}, 2048);
        auto r = recurrence_report(s, Observable::box({{0, 0.3}}), {P("t^1.5"), P("t^1.1")}, {1000, 10000});
        CHECK(r.bound == doctest::Approx(0.027));
        CHECK(r.holds);
    }
    SUBCASE("cyclic systems are exact") {
        System s{{TransformSpec::cyclic(5, 2)}, {SampleSpec::Kind::AllResidues, 5, 1}};
        auto r = recurrence_report(s, Observable::table({1, 1, 0, 0, 0}), {P("t^1.5")}, {2000});
        CHECK(r.exact);
        CHECK(r.rows[0].std_error == 0);
        CHECK(r.holds);
    }
    CHECK_THROWS_AS(recurrence_report(rotations({"sqrt(2)"}), Observable::character({1}), {P("t^1.5")}, {10}),
                    DomainError);
    CHECK_THROWS_AS(recurrence_report(rotations({"sqrt(2)"}), Observable::box({{0, 0.5}}), {P("t^2")}, {10}),
                    DomainError);
}

TEST_CASE("block averages") {
    auto e = two_rotations({1});
    e.system.samples.count = 4;
    auto r = block_average_check(e, {10, 100, 1000}, 200);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.decreasing);
    CHECK(r.rows[2].value < r.rows[0].value);
    e.f = {Observable::constant(1, 1), Observable::constant(1, 1)};
    auto c = block_average_check(e, {10, 100, 1000}, 50);
    for (auto& row : c.rows) CHECK(row.value < 1e-12);
}

TEST_CASE("degree-zero iterates are constant on blocks") {
    auto rows = block_constancy(P("log(t)^2"), 100, {1000, 100000});
    CHECK(rows.back().fraction > 0.99);
    CHECK(rows.back().fraction >= rows.front().fraction);
    CHECK_THROWS_AS(block_constancy(P("t^1.5"), 100, {10}), DomainError);
}

TEST_CASE("subsequence averages") {
    auto r = subsequence_average_check(P("t/log(t)"), Angle::parse("sqrt(2)"), 1000000);
    CHECK(r.first == 2);
    CHECK(r.both_small);
    auto g = subsequence_average_check(P("t^0.7"), Angle::parse("golden"), 1000000);
    CHECK(g.both_small);
    auto c = subsequence_average_check(P("t^0.7"), Angle::parse("0"), 1000);
    CHECK(c.uniform_average == doctest::Approx(1));
    CHECK(c.subsequence_average == doctest::Approx(1));
    CHECK(!c.both_small);
    CHECK_THROWS_AS(subsequence_average_check(P("t^1.5"), Angle::parse("sqrt(2)"), 10), DomainError);
    CHECK_THROWS_AS(subsequence_average_check(P("log(t)"), Angle::parse("sqrt(2)"), 10), DomainError);
}

TEST_CASE("parity runs") {
    auto r = parity_runs(P("t^1.5"), 1000000);
    CHECK(r.longest >= 5);
    auto p = parity_runs(P("t^1.5"), r.start + r.longest - 1);
    CHECK(p.longest == r.longest);
    CHECK(parity_runs(P("t"), 1000).longest == 1);
    auto even = parity_runs(P("2*t"), 1000);
    CHECK(even.longest == 1000);
    CHECK(even.parity == 0);
    CHECK(even.start == 1);
}
