#include <omp.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>

#include "doctest.h"
#include "ergolab/kernels.hpp"

using namespace ergolab;
using namespace ergolab::dyn;

namespace {

// restores the thread count on scope exit
struct Threads {
    int saved = omp_get_max_threads();
    explicit Threads(int n) { omp_set_num_threads(n); }
    ~Threads() { omp_set_num_threads(saved); }
};

}  // namespace

TEST_CASE("floor values: parallel, serial and integer square roots agree") {
    hardy::FloorEvaluator a(hardy::HardyExpr::parse("t^1.5"));
    auto par = kern::floor_values(a, 1, 20000);
    auto ser = kern::floor_values_serial(a, 1, 20000);
    CHECK(par == ser);
    for (std::uint64_t n = 1; n <= 20000; n += 7) {
        boost::multiprecision::cpp_int c = boost::multiprecision::cpp_int(n) * n * n;
        CHECK(static_cast<std::int64_t>(boost::multiprecision::sqrt(c)) == par[n - 1]);
    }
    CHECK(std::vector<std::int64_t>(par.begin(), par.begin() + 5) == std::vector<std::int64_t>{1, 2, 5, 8, 11});
    CHECK(kern::floor_values(a, 5, 4).empty());
}

TEST_CASE("weyl sums are thread-count independent") {
    hardy::FloorEvaluator a(hardy::HardyExpr::parse("t^1.5"));
    auto seq = kern::floor_values(a, 1, 50000);
    Fix al = Angle::parse("sqrt(2)").fix();
    cplx one, four;
    {
        Threads t(1);
        one = kern::weyl_sum(seq, 0, seq.size(), al, 3);
    }
    {
        Threads t(4);
        four = kern::weyl_sum(seq, 0, seq.size(), al, 3);
    }
    CHECK(one == four);
    cplx ser = kern::weyl_sum_serial(seq, 0, seq.size(), al, 3);
    CHECK(std::abs(one - ser) < 1e-9);
    // geometric series for the identity sequence
    std::vector<std::int64_t> id(1000);
    for (int i = 0; i < 1000; ++i) id[i] = i + 1;
    double x = std::sqrt(2.0) * 6.283185307179586;
    cplx closed = std::polar(1.0, x) * (cplx(1) - std::polar(1.0, 1000 * x)) / (cplx(1) - std::polar(1.0, x));
    CHECK(std::abs(kern::weyl_sum(id, 0, 1000, al, 1) - closed) < 1e-9);
}

TEST_CASE("multi sums are thread-count independent and match the serial loop") {
    auto T1 = TransformSpec::rotation({Angle::parse("sqrt(2)")});
    auto T2 = TransformSpec::rotation({Angle::parse("sqrt(3)")});
    hardy::FloorEvaluator a1(hardy::HardyExpr::parse("t^1.5")), a2(hardy::HardyExpr::parse("t^1.1"));
    auto p1 = kern::floor_values(a1, 1, 30000), p2 = kern::floor_values(a2, 1, 30000);
    auto f1 = Observable::fourier({{{1}, {0.5, 0}}, {{2}, {0, 0.5}}});
    auto f2 = Observable::box({{0.2, 0.7}});
    std::vector<kern::MultiTerm> terms{{&T1, &f1, &p1}, {&T2, &f2, &p2}};
    System sys{{T1, T2}, {SampleSpec::Kind::Uniform, 5, 8}};
    auto pts = sample_points(sys);
    std::vector<cplx> one, four;
    {
        Threads t(1);
        one = kern::multi_sum(terms, pts, 0, p1.size(), 0, &f2);
    }
    {
        Threads t(4);
        four = kern::multi_sum(terms, pts, 0, p1.size(), 0, &f2);
    }
    CHECK(one == four);
    auto ser = kern::multi_sum_serial(terms, pts, 0, p1.size(), 0, &f2);
    for (size_t s = 0; s < pts.size(); ++s) CHECK(std::abs(one[s] - ser[s]) < 1e-8);
    // direct evaluation of a few terms
    cplx direct = 0;
    for (size_t i = 100; i < 110; ++i)
        direct += f1.eval(iterate_power(T1, p1[i], pts[0])) * f2.eval(iterate_power(T2, p2[i], pts[0]));
    CHECK(std::abs(kern::multi_sum(terms, pts, 100, 110, 0)[0] - direct) < 1e-12);
}
