#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <random>

#include "doctest.h"
#include "ergolab/hardy.hpp"

using namespace ergolab;
using namespace ergolab::hardy;
using Big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<240>>;

namespace {

struct Mono {
    long cn, cd;  // coefficient cn/cd
    long shift;
    long pn, pd;  // exponent pn/pd
    long qn, qd;
};

Big oracle(const std::vector<Mono>& ms, std::uint64_t n) {
    Big s = 0;
    for (auto& m : ms) {
        Big x = Big(n) + m.shift;
        Big v = Big(m.cn) / m.cd * boost::multiprecision::pow(x, Big(m.pn) / m.pd);
        if (m.qn) v *= boost::multiprecision::pow(boost::multiprecision::log(x), Big(m.qn) / m.qd);
        s += v;
    }
    return s;
}

HardyExpr build(const std::vector<Mono>& ms) {
    HardyExpr e;
    for (auto& m : ms)
        e += HardyExpr::shifted_monomial(ShiftPoly(mpq_class(m.cn, m.cd)), Rational(m.pn, m.pd), Rational(m.qn, m.qd),
                                         ShiftPoly(m.shift));
    return e;
}

}  // namespace

TEST_CASE("floor_eval agrees with a 240-bit oracle") {
    std::mt19937_64 rng(12345);
    auto pick = [&](long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); };
    int near_integer = 0, exact_path = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        std::vector<Mono> ms;
        int terms = static_cast<int>(pick(1, 3));
        for (int k = 0; k < terms; ++k) {
            Mono m{};
            m.cn = pick(-5, 5);
            if (m.cn == 0) m.cn = 1;
            m.cd = pick(1, 4);
            m.pd = pick(1, 6);
            m.pn = pick(-m.pd, 4 * m.pd);
            m.shift = terms == 1 && pick(0, 1) ? 0 : pick(0, 3);
            m.qd = 2;
            m.qn = pick(0, 3) ? 0 : pick(-2, 3);
            ms.push_back(m);
        }
        std::uint64_t n = static_cast<std::uint64_t>(std::pow(10.0, std::uniform_real_distribution<double>(0.4, 12.0)(rng)));
        HardyExpr e = build(ms);
        if (e.is_zero()) continue;
        Big v = oracle(ms, n);
        Big fl = boost::multiprecision::floor(v);
        // values this close to an integer are integers (exact powers); the oracle rounds them
        Big r = boost::multiprecision::round(v);
        if (boost::multiprecision::abs(v - r) < Big("1e-50")) {
            fl = r;
            ++near_integer;
        }
        FloorInfo info;
        mpz_class got = floor_eval(e, n, {}, &info);
        if (info.bits_used == 0) ++exact_path;
        auto want = fl.convert_to<boost::multiprecision::cpp_int>().str();
        CHECK_MESSAGE(got.get_str() == want, e.str() << " at n=" << n);
    }
    CHECK(near_integer > 0);
    CHECK(exact_path > 0);
}

TEST_CASE("pure powers take the exact root path") {
    FloorEvaluator f(HardyExpr::parse("3/2*t^(7/3)"));
    CHECK(f.exact_root_path());
    // floor(1.5 * 8^(7/3)) = floor(1.5 * 128) = 192
    CHECK(f(8) == 192);
    CHECK(f.small(1000000) == 150000000000000LL);
    FloorEvaluator g(HardyExpr::parse("t^(3/2) + log(t)"));
    CHECK(!g.exact_root_path());
    CHECK(g(100) == 1004);  // 1000 + 4.605...
}
