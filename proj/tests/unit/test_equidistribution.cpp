#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <random>

#include "doctest.h"
#include "ergolab/equidistribution.hpp"
#include "ergolab/errors.hpp"

using namespace ergolab;
using namespace ergolab::equi;
using hardy::HardyExpr;
using dyn::Angle;

namespace {

using Big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<200>>;

HardyExpr P(const char* s) { return HardyExpr::parse(s); }

const double kTau = 6.283185307179586476925286766559;

}  // namespace

TEST_CASE("floor sequences") {
    CHECK(floor_seq(P("t^1.5"), 5).values == std::vector<std::int64_t>{1, 2, 5, 8, 11});
    CHECK(floor_seq(P("t"), 5).values == std::vector<std::int64_t>{1, 2, 3, 4, 5});
    CHECK(floor_seq(P("t^(1/3)"), 8).values == std::vector<std::int64_t>{1, 1, 1, 1, 1, 1, 1, 2});
    auto s = floor_seq(P("t/log(t)"), 10, 2);
    CHECK(s.first == 2);
    CHECK(s.values.size() == 9);
    CHECK(s.values[0] == 2);  // 2/log 2 = 2.885
    CHECK_THROWS_AS(floor_seq(P("t/log(t)"), 10, 1), DomainError);
}

TEST_CASE("floor sequences agree with a 200-bit oracle on random probes") {
    std::mt19937_64 rng(2024);
    struct Case {
        const char* text;
        Big (*f)(const Big&);
    };
    Case cases[] = {
        {"t^1.1", [](const Big& t) { return Big(pow(t, Big(11) / 10)); }},
        {"2*t^1.5 + t^0.5", [](const Big& t) { return Big(2 * pow(t, Big(3) / 2) + sqrt(t)); }},
        {"t/log(t)", [](const Big& t) { return Big(t / log(t)); }},
        {"t^0.7 + 3*log(t)", [](const Big& t) { return Big(pow(t, Big(7) / 10) + 3 * log(t)); }},
    };
    int checked = 0;
    for (auto& c : cases) {
        auto seq = floor_seq(P(c.text), 1000000, 2);
        for (int i = 0; i < 2500; ++i) {
            std::uint64_t n = std::uniform_int_distribution<std::uint64_t>(2, 1000000)(rng);
            Big v = c.f(Big(n));
            Big fl = floor(v);
            if (v - fl < Big("1e-40") || fl + 1 - v < Big("1e-40")) continue;  // oracle too close to call
            CHECK_MESSAGE(seq.values[n - 2] == fl.convert_to<std::int64_t>(), c.text << " at n=" << n);
            ++checked;
        }
    }
    CHECK(checked > 9900);
}

TEST_CASE("weyl sums") {
    SUBCASE("linear sequence: geometric bound") {
        auto r = weyl_sum(P("t"), Angle::parse("sqrt(2)"), 1, {1000, 100000});
        double bound = 2 / std::abs(std::complex<double>(1) - std::polar(1.0, kTau * std::sqrt(2.0)));
        CHECK(r.magnitudes[0] <= bound / 1000);
        CHECK(r.magnitudes[1] <= bound / 100000);
    }
    SUBCASE("t^2 at rational angles") {
        auto half = weyl_sum(P("t^2"), Angle::parse("1/2"), 1, {10000, 100000});
        CHECK(half.magnitudes[1] < 1e-9);
        auto third = weyl_sum(P("t^2"), Angle::parse("1/3"), 1, {100000});
        CHECK(std::abs(third.magnitudes[0] - 1 / std::sqrt(3.0)) < 0.01);
    }
    SUBCASE("decay by a factor 3 from 1e4 to 1e6 on the regime matrix") {
        struct Row {
            const char* a;
            const char* alpha;
            long k;
        } rows[] = {{"t^1.5", "sqrt(2)", 1}, {"t^1.1", "sqrt(3)", 1}, {"t^1.5", "golden", 2}, {"t^0.7", "sqrt(5)", 1},
                    {"t^2.5", "sqrt(7)", -1}};
        for (auto& row : rows) {
            auto r = weyl_sum(P(row.a), Angle::parse(row.alpha), row.k, {10000, 1000000});
            CHECK_MESSAGE(r.magnitudes[1] * 3 <= r.magnitudes[0], row.a << " " << row.alpha << ": " << r.magnitudes[0]
                                                                           << " -> " << r.magnitudes[1]);
            CHECK(r.magnitudes[0] <= 1);
            CHECK(r.phase_error < 1e-20);
        }
    }
    CHECK_THROWS_AS(weyl_sum(P("t"), Angle::parse("sqrt(2)"), 1, {100, 10}), DomainError);
}

TEST_CASE("star discrepancy") {
    std::vector<double> grid;
    for (int i = 0; i < 1000; ++i) grid.push_back(i / 1000.0);
    CHECK(star_discrepancy(grid) == doctest::Approx(1e-3));
    CHECK(star_discrepancy({0.0}) == 1.0);
    CHECK(star_discrepancy({0.5}) == 0.5);
    auto seq = floor_seq(P("t^1.5"), 100000);
    std::vector<double> pts;
    dyn::Fix a = Angle::parse("sqrt(2)").fix();
    for (auto p : seq.values) pts.push_back(dyn::to_double(dyn::mul(a, p)));
    CHECK(star_discrepancy(pts) <= 0.01);
    CHECK_THROWS_AS(star_discrepancy({}), DomainError);
}

TEST_CASE("grid discrepancy against brute-force anchored boxes") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<std::vector<double>> pts(300, std::vector<double>(2));
    for (auto& p : pts) p = {u(rng), u(rng)};
    int g = 6;
    double want = 0;
    for (int i = 1; i <= g; ++i)
        for (int j = 1; j <= g; ++j) {
            double c = 0;
            for (auto& p : pts)
                if (p[0] < static_cast<double>(i) / g && p[1] < static_cast<double>(j) / g) c += 1;
            want = std::max(want, std::abs(c / pts.size() - static_cast<double>(i * j) / (g * g)));
        }
    CHECK(grid_discrepancy(pts, g).value == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("joint equidistribution") {
    SUBCASE("two irrational rotations, 8x8 grid") {
        auto r = joint_equidistribution_check({{P("t^1.5"), Angle::parse("sqrt(2)"), 0}, {P("t^1.1"), Angle::parse("sqrt(3)"), 0}},
                                              1000000, 8);
        CHECK(r.regime_ok);
        CHECK(r.max_dev_lebesgue <= 0.02);
        CHECK(r.max_dev_target == r.max_dev_lebesgue);
    }
    SUBCASE("rational angles: finite orbit closure") {
        auto r = joint_equidistribution_check({{P("t^1.5"), Angle::parse("1/2"), 0}, {P("t^1.1"), Angle::parse("1/3"), 0}},
                                              200000, 8);
        CHECK(r.max_dev_lebesgue > 0.1);
        CHECK(r.max_dev_target < 0.01);
        CHECK(r.target.find("uniform on 2 points") != std::string::npos);
    }
    SUBCASE("single coordinate is a discrepancy check") {
        auto r = joint_equidistribution_check({{P("t^1.5"), Angle::parse("sqrt(2)"), 0}}, 100000, 16);
        auto seq = floor_seq(P("t^1.5"), 100000);
        std::vector<double> pts;
        for (auto p : seq.values) pts.push_back(dyn::to_double(dyn::mul(Angle::parse("sqrt(2)").fix(), p)));
        CHECK(r.max_dev_lebesgue <= 2 * star_discrepancy(pts) + 1e-12);
    }
    SUBCASE("regime flags") {
        auto r = joint_equidistribution_check({{P("t^2"), Angle::parse("sqrt(2)"), 0}, {P("2*t^2"), Angle::parse("sqrt(3)"), 0}},
                                              1000, 4);
        CHECK(!r.regime_ok);
        CHECK(!r.regime_note.empty());
    }
}

TEST_CASE("product characters factorize") {
    auto r = product_character_check({{P("t^1.5"), Angle::parse("sqrt(2)"), 0}, {P("t^1.1"), Angle::parse("sqrt(3)"), 0}},
                                     {1, 1}, 200000);
    CHECK(r.product_of_limits == std::complex<double>(0));
    CHECK(r.within);
    dyn::Fix x = dyn::fix_from_double(0.1);
    auto s = product_character_check({{P("t^1.5"), Angle::parse("1/2"), x}, {P("t^1.1"), Angle::parse("sqrt(3)"), 0}},
                                     {2, 0}, 100000);
    CHECK(std::abs(s.product_of_limits - dyn::e(dyn::mul(x, 2))) < 1e-12);
    CHECK(s.within);
}

TEST_CASE("sequences with log t in a denominator start at n = 2") {
    auto e = hardy::HardyExpr::parse("t/log(t)");
    auto r = equi::weyl_sum(e, dyn::Angle::parse("sqrt(2)"), 1, {10, 1000});
    // direct sum over n = 2..N, divided by N
    double x = std::sqrt(2.0);
    for (size_t j = 0; j < 2; ++j) {
        long N = r.schedule[j];
        std::complex<double> s = 0;
        for (long n = 2; n <= N; ++n) s += std::polar(1.0, 6.283185307179586 * x * std::floor(n / std::log(double(n))));
        CHECK(r.magnitudes[j] == doctest::Approx(std::abs(s) / N).epsilon(1e-9));
    }
    CHECK_THROWS_AS(equi::weyl_sum(e, dyn::Angle::parse("sqrt(2)"), 1, {1, 10}), DomainError);
}
