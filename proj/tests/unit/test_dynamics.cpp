#include <cmath>
#include <random>

#include "doctest.h"
#include "ergolab/dynamics.hpp"
#include "ergolab/errors.hpp"
#include "ergolab/mpfr_util.hpp"

using namespace ergolab;
using namespace ergolab::dyn;

namespace {

const double kTau = 6.283185307179586476925286766559;

Angle A(const char* s) { return Angle::parse(s); }

System rotation_system(std::vector<Angle> a, size_t samples = 8) {
    return System{{TransformSpec::rotation(std::move(a))}, {SampleSpec::Kind::Uniform, samples, 5}};
}

// frac(p * sqrt(m)) from MPFR at 400 bits
double frac_p_sqrt(long long p, unsigned m) {
    Mpfr v(400);
    mpfr_set_ui(v.get(), m, MPFR_RNDN);
    mpfr_sqrt(v.get(), v.get(), MPFR_RNDN);
    mpfr_mul_si(v.get(), v.get(), p, MPFR_RNDN);
    mpfr_frac(v.get(), v.get(), MPFR_RNDN);
    if (mpfr_sgn(v.get()) < 0) mpfr_add_ui(v.get(), v.get(), 1, MPFR_RNDN);
    return mpfr_get_d(v.get(), MPFR_RNDN);
}

}  // namespace

TEST_CASE("angles") {
    CHECK(A("1/3").is_rational());
    CHECK(A("1/3").fix() == fix_from_mpq(mpq_class(1, 3)));
    CHECK(A("0.25").fix() == (static_cast<Fix>(1) << 126));
    auto s12 = A("sqrt(12)");
    REQUIRE(s12.surds().size() == 1);
    CHECK(s12.surds()[0].first == 3);
    CHECK(s12.surds()[0].second == 2);
    CHECK(std::abs(A("3*sqrt(5)/2").value() - 1.5 * std::sqrt(5.0)) < 1e-15);
    CHECK(std::abs(A("golden").value() - 1.6180339887498949) < 1e-15);
    CHECK(std::abs(to_double(A("golden").fix()) - 0.6180339887498949) < 1e-15);
    CHECK(std::abs(to_double(A("-sqrt(2)").fix()) - (2 - std::sqrt(2.0))) < 1e-15);
    CHECK(A("sqrt(4)").is_rational());
    CHECK_THROWS_AS(A("sqrt(2)*sqrt(3)"), ParseError);
    CHECK_THROWS_AS(A("sqrt(2"), ParseError);
    CHECK_THROWS_AS(A("1/sqrt(2)"), ParseError);
}

TEST_CASE("rational independence") {
    CHECK(rationally_independent({A("sqrt(2)")}));
    CHECK(rationally_independent({A("sqrt(2)"), A("sqrt(3)")}));
    CHECK(!rationally_independent({A("sqrt(2)"), A("1 + 2*sqrt(2)")}));
    CHECK(!rationally_independent({A("1/3")}));
    CHECK(!rationally_independent({A("sqrt(2)"), A("sqrt(2)")}));
    CHECK(integer_combination({A("sqrt(2)"), A("1/2 - sqrt(2)")}, {2, 2}));
    CHECK(!integer_combination({A("sqrt(2)"), A("1/2 - sqrt(2)")}, {1, 1}));
}

TEST_CASE("iterate_power closed forms") {
    auto R = TransformSpec::rotation({A("sqrt(2)")});
    Point x{fix_from_double(0.3)};
    CHECK(iterate_power(R, 0, x) == x);
    auto C = TransformSpec::cyclic(3, 1);
    CHECK(iterate_power(C, 1000000000LL, {0}) == Point{1});
    CHECK(iterate_power(C, -1, {0}) == Point{2});

    auto S = TransformSpec::skew(A("sqrt(3)"), A("1/7"));
    Point p{fix_from_double(0.2), fix_from_double(0.9)};
    Fix a = A("sqrt(3)").fix(), b = A("1/7").fix();
    CHECK(iterate_power(S, 2, p) == Point{p[0] + 2 * a, p[1] + 2 * p[0] + a + 2 * b});

    // closed form against repeated single steps, both directions
    for (auto* T : {&R, &S}) {
        Point y = T == &R ? x : p;
        Point z = y;
        for (int n = 1; n <= 500; ++n) {
            step(*T, z);
            CHECK(iterate_power(*T, n, y) == z);
        }
        CHECK(iterate_power(*T, -500, z) == y);
    }
    CHECK_THROWS_AS(iterate_power(R, mpz_class("9223372036854775808"), x), Overflow);
    CHECK(iterate_power(R, mpz_class(5), x) == iterate_power(R, 5LL, x));
}

TEST_CASE("fixed-point powers stay accurate for 63-bit exponents") {
    std::mt19937_64 rng(17);
    auto R = TransformSpec::rotation({A("sqrt(2)")});
    for (int i = 0; i < 200; ++i) {
        long long p = static_cast<long long>(rng() >> 1) * (i % 2 ? 1 : -1);
        double got = to_double(iterate_power(R, p, {0})[0]);
        double want = frac_p_sqrt(p, 2);
        double err = std::abs(got - want);
        err = std::min(err, 1 - err);
        CHECK(err < std::ldexp(1.0, -33));
    }
}

TEST_CASE("torus rotations commute bit-exactly") {
    std::mt19937_64 rng(3);
    auto T1 = TransformSpec::rotation({A("sqrt(2)"), A("1/3")});
    auto T2 = TransformSpec::rotation({A("golden"), A("sqrt(7)")});
    for (int i = 0; i < 100; ++i) {
        long long p = static_cast<long long>(rng() >> 2), q = -static_cast<long long>(rng() >> 3);
        Point x{static_cast<Fix>(rng()) << 64 | rng(), static_cast<Fix>(rng())};
        CHECK(iterate_power(T1, p, iterate_power(T2, q, x)) == iterate_power(T2, q, iterate_power(T1, p, x)));
    }
}

TEST_CASE("system validation") {
    System mixed{{TransformSpec::rotation({A("sqrt(2)")}), TransformSpec::cyclic(3, 1)}, {}};
    CHECK_THROWS_AS(mixed.validate(), DomainError);
    System skews{{TransformSpec::skew(A("sqrt(2)"), A("0")), TransformSpec::skew(A("sqrt(2)"), A("sqrt(5)"))}, {}};
    CHECK_NOTHROW(skews.validate());
    System bad{{TransformSpec::skew(A("sqrt(2)"), A("0")), TransformSpec::skew(A("sqrt(3)"), A("0"))}, {}};
    CHECK_THROWS_AS(bad.validate(), DomainError);
    System dims{{TransformSpec::rotation({A("sqrt(2)")}), TransformSpec::rotation({A("sqrt(2)"), A("0")})}, {}};
    CHECK_THROWS_AS(dims.validate(), DomainError);
}

TEST_CASE("sample points are reproducible") {
    auto sys = rotation_system({A("sqrt(2)"), A("sqrt(3)")}, 32);
    CHECK(sample_points(sys) == sample_points(sys));
    sys.samples.kind = SampleSpec::Kind::LowDiscrepancy;
    auto ld = sample_points(sys);
    REQUIRE(ld.size() == 32);
    CHECK(ld == sample_points(sys));
    System cyc{{TransformSpec::cyclic(5, 2)}, {SampleSpec::Kind::AllResidues, 0, 0}};
    CHECK(sample_points(cyc).size() == 5);
}

TEST_CASE("observables") {
    auto f = Observable::fourier({{{1}, {2, 0}}, {{0}, {0.5, 0}}});
    CHECK(std::abs(f.eval({fix_from_double(0.25)}) - cplx(0.5, 2)) < 1e-14);
    CHECK(f.bound() == doctest::Approx(2.5));
    CHECK(std::abs(f.integral(1) - cplx(0.5)) < 1e-15);
    auto b = Observable::box({{0.0, 0.3}, {0.5, 1.0}});
    CHECK(b.eval({fix_from_double(0.1), fix_from_double(0.7)}) == cplx(1));
    CHECK(b.eval({fix_from_double(0.3), fix_from_double(0.7)}) == cplx(0));
    CHECK(b.integral(2).real() == doctest::Approx(0.15));
    auto c = Observable::cyclic_character(3, 1);
    CHECK(std::abs(c.eval({1}, 3) - std::polar(1.0, kTau / 3)) < 1e-15);
    CHECK(std::abs(Observable::character({1}).eval({2}, 3) - std::polar(1.0, 2 * kTau / 3)) < 1e-15);
    CHECK_THROWS_AS(Observable::box({{0.5, 1.2}}), DomainError);
    CHECK_THROWS_AS(Observable::table({1, 2}).validate(1, 0), DomainError);
}

TEST_CASE("conditional expectations") {
    SUBCASE("irrational rotation, e(x): Birkhoff average against the geometric sum") {
        auto sys = rotation_system({A("sqrt(2)")});
        auto r = conditional_expectation(sys, 0, Observable::character({1}), 100000);
        REQUIRE(r.oracle);
        double a = std::sqrt(2.0);
        for (size_t i = 0; i < r.points.size(); ++i) {
            CHECK(std::abs((*r.oracle)[i]) == 0);
            double x = to_double(r.points[i][0]);
            cplx closed = std::polar(1.0, kTau * (x + a)) * (cplx(1) - std::polar(1.0, kTau * 100000 * a)) /
                          (100000.0 * (cplx(1) - std::polar(1.0, kTau * a)));
            CHECK(std::abs(r.birkhoff[i] - closed) < 1e-9);
        }
        CHECK(r.max_error() < 2.0 / (100000 * std::abs(cplx(1) - std::polar(1.0, kTau * a))));
    }
    SUBCASE("constant") {
        auto r = conditional_expectation(rotation_system({A("sqrt(2)")}), 0, Observable::constant(1, 1), 1000);
        CHECK(r.max_error() < 1e-12);
    }
    SUBCASE("cyclic m=4 step=2") {
        System sys{{TransformSpec::cyclic(4, 2)}, {SampleSpec::Kind::AllResidues, 0, 0}};
        auto r = conditional_expectation(sys, 0, Observable::table({1, 0, 0, 0}), 1000);
        REQUIRE(r.oracle);
        CHECK(std::abs((*r.oracle)[0] - cplx(0.5)) < 1e-15);
        CHECK(std::abs((*r.oracle)[1]) < 1e-15);
        CHECK(std::abs(r.birkhoff[0] - cplx(0.5)) < 1e-15);
    }
    SUBCASE("non-ergodic rotation keeps invariant frequencies") {
        auto sys = rotation_system({A("sqrt(2)"), A("sqrt(2)")});
        auto f = Observable::fourier({{{1, -1}, {1, 0}}, {{1, 0}, {1, 0}}});
        auto r = conditional_expectation(sys, 0, f, 200000);
        REQUIRE(r.oracle);
        CHECK(!r.estimate_only);
        for (size_t i = 0; i < r.points.size(); ++i)
            CHECK(std::abs((*r.oracle)[i] - Observable::character({1, -1}).eval(r.points[i])) < 1e-14);
        CHECK(r.max_error() < 1e-4);
    }
    SUBCASE("rational rotation with a box is estimate-only") {
        auto r = conditional_expectation(rotation_system({A("1/4")}), 0, Observable::box({{0, 0.5}}), 100);
        CHECK(r.estimate_only);
        CHECK(!r.oracle);
    }
    SUBCASE("skew product is ergodic for irrational alpha") {
        System sys{{TransformSpec::skew(A("sqrt(2)"), A("0"))}, {SampleSpec::Kind::Uniform, 4, 1}};
        auto r = conditional_expectation(sys, 0, Observable::character({0, 1}), 200000);
        REQUIRE(r.oracle);
        CHECK(r.max_error() < 0.02);
    }
}

TEST_CASE("van der Corput inequality") {
    SUBCASE("e(n sqrt 2), N=1e4, H=100") {
        std::vector<std::vector<cplx>> v;
        for (int n = 1; n <= 10000; ++n) v.push_back({std::polar(1.0, kTau * n * std::sqrt(2.0))});
        CHECK(vdc_inequality_check(v, 100).holds);
    }
    SUBCASE("constant unit vector") {
        std::vector<std::vector<cplx>> v(500, std::vector<cplx>{cplx(0.6, 0), cplx(0, 0.8)});
        auto r = vdc_inequality_check(v, 20);
        CHECK(r.lhs == doctest::Approx(1.0));
        CHECK(r.holds);
        // rhs by hand: zero extension leaves N-h terms of 1 at each h
        double acc = 0;
        for (int h = 1; h <= 20; ++h) acc += (1 - h / 20.0) * (500.0 - h) / 500;
        CHECK(r.rhs == doctest::Approx(2.0 / 20 * acc + 2.0 / 20 + 4.0 * 20 / 500));
    }
    SUBCASE("random signs, N=1e5, H=316") {
        std::mt19937_64 rng(11);
        std::vector<std::vector<cplx>> v;
        for (int n = 0; n < 100000; ++n) v.push_back({cplx(rng() & 1 ? 1.0 : -1.0)});
        CHECK(vdc_inequality_check(v, 316).holds);
    }
    CHECK_THROWS_AS(vdc_inequality_check({{cplx(2)}}, 1), DomainError);
    CHECK_THROWS_AS(vdc_inequality_check({{cplx(1)}}, 2), DomainError);
}
