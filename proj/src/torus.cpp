#include "ergolab/torus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "ergolab/errors.hpp"
#include "ergolab/mpfr_util.hpp"

namespace ergolab::dyn {

namespace {

const double kTwo64 = 18446744073709551616.0;

Fix mpz_to_fix(const mpz_class& z) {
    // z in [0, 2^128)
    mpz_class lo = z & mpz_class("18446744073709551615");
    mpz_class hi = z >> 64;
    return (static_cast<Fix>(hi.get_ui()) << 64) | static_cast<Fix>(lo.get_ui());
}

// squarefree part: n = s^2 * r
std::pair<unsigned long, unsigned long> squarefree(unsigned long n) {
    unsigned long s = 1, r = 1;
    for (unsigned long p = 2; p * p <= n; ++p) {
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        for (int i = 0; i < e / 2; ++i) s *= p;
        if (e % 2) r *= p;
    }
    r *= n;
    return {s, r};
}

// element of Q(sqrt m_1, ...): radicand -> coefficient, radicand 1 is the rational part
using Surd = std::map<unsigned long, mpq_class>;

void add_into(Surd& a, const Surd& b, int sign) {
    for (auto& [m, c] : b) {
        a[m] += sign * c;
        if (a[m] == 0) a.erase(m);
    }
}

struct AngleParser {
    std::string_view s;
    size_t i = 0;

    void ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eat(char c) {
        ws();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError("Angle::parse", msg + " at offset " + std::to_string(i) + " in '" + std::string(s) + "'");
    }

    Surd expr() {
        Surd v;
        int sign = 1;
        if (eat('-')) sign = -1;
        else eat('+');
        add_into(v, term(), sign);
        for (;;) {
            if (eat('+')) add_into(v, term(), 1);
            else if (eat('-')) add_into(v, term(), -1);
            else break;
        }
        return v;
    }

    Surd term() {
        Surd v = factor();
        for (;;) {
            if (eat('*')) v = product(v, factor());
            else if (eat('/')) {
                Surd d = factor();
                if (d.size() != 1 || !d.count(1)) fail("division by a non-rational");
                for (auto& [m, c] : v) c /= d[1];
            } else break;
        }
        return v;
    }

    Surd product(const Surd& a, const Surd& b) {
        // only rational * anything
        const Surd* r = nullptr;
        const Surd* o = nullptr;
        if (a.size() == 1 && a.count(1)) r = &a, o = &b;
        else if (b.size() == 1 && b.count(1)) r = &b, o = &a;
        if (a.empty() || b.empty()) return {};
        if (!r) fail("product of two irrationals");
        Surd out = *o;
        for (auto& [m, c] : out) c *= r->at(1);
        return out;
    }

    Surd factor() {
        ws();
        if (eat('(')) {
            Surd v = expr();
            if (!eat(')')) fail("expected ')'");
            return v;
        }
        if (s.substr(i, 5) == "sqrt(") {
            i += 5;
            ws();
            size_t st = i;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            if (st == i) fail("expected integer radicand");
            unsigned long n = std::stoul(std::string(s.substr(st, i - st)));
            if (!eat(')')) fail("expected ')'");
            if (n == 0) return {};
            auto [sq, r] = squarefree(n);
            return Surd{{r, mpq_class(sq)}};
        }
        if (s.substr(i, 6) == "golden") {
            i += 6;
            return Surd{{1, mpq_class(1, 2)}, {5, mpq_class(1, 2)}};
        }
        size_t st = i;
        while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) ++i;
        if (st == i) fail("expected number");
        std::string num(s.substr(st, i - st));
        mpq_class q;
        auto dot = num.find('.');
        if (dot == std::string::npos) {
            q = mpq_class(mpz_class(num, 10));
        } else {
            std::string digits = num.substr(0, dot) + num.substr(dot + 1);
            if (digits.empty() || num.find('.', dot + 1) != std::string::npos) fail("bad decimal");
            mpz_class den;
            mpz_ui_pow_ui(den.get_mpz_t(), 10, num.size() - dot - 1);
            q = mpq_class(mpz_class(digits, 10), den);
            q.canonicalize();
        }
        if (q == 0) return {};
        return Surd{{1, q}};
    }
};

}  // namespace

double to_double(Fix x) { return static_cast<double>(static_cast<std::uint64_t>(x >> 64)) / kTwo64 +
                                 static_cast<double>(static_cast<std::uint64_t>(x)) / kTwo64 / kTwo64; }

Fix fix_from_double(double x) {
    x -= std::floor(x);
    double hi = std::floor(x * kTwo64);
    if (hi >= kTwo64) hi = kTwo64 - 1;  // rounding right below 1
    double lo = (x * kTwo64 - hi) * kTwo64;
    if (lo < 0) lo = 0;
    return (static_cast<Fix>(static_cast<std::uint64_t>(hi)) << 64) |
           static_cast<Fix>(static_cast<std::uint64_t>(std::min(lo, kTwo64 - 1)));
}

Fix fix_from_mpq(const mpq_class& v) {
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
    mpq_class frac = v - fl;
    mpz_class scaled = (frac.get_num() << 128) / frac.get_den();
    return mpz_to_fix(scaled);
}

std::string fix_hex(Fix x) {
    static const char* d = "0123456789abcdef";
    std::string s(32, '0');
    for (int i = 31; i >= 0; --i, x >>= 4) s[i] = d[static_cast<int>(x & 15)];
    return "0x" + s;
}

Angle Angle::rational(const mpq_class& r) {
    Angle a;
    a.r_ = r;
    a.finish();
    return a;
}

Angle Angle::parse(std::string_view text) {
    AngleParser p{text};
    Surd v = p.expr();
    p.ws();
    if (p.i != text.size()) p.fail("trailing input");
    Angle a;
    for (auto& [m, c] : v) {
        if (m == 1) a.r_ = c;
        else a.surds_.emplace_back(m, c);
    }
    a.finish();
    a.text_ = std::string(text);
    return a;
}

void Angle::finish() {
    if (surds_.empty()) {
        fix_ = fix_from_mpq(r_);
    } else {
        Mpfr acc(320), t(320);
        mpfr_set_q(acc.get(), r_.get_mpq_t(), MPFR_RNDN);
        for (auto& [m, c] : surds_) {
            mpfr_set_ui(t.get(), m, MPFR_RNDN);
            mpfr_sqrt(t.get(), t.get(), MPFR_RNDN);
            mpfr_mul_q(t.get(), t.get(), c.get_mpq_t(), MPFR_RNDN);
            mpfr_add(acc.get(), acc.get(), t.get(), MPFR_RNDN);
        }
        mpfr_frac(acc.get(), acc.get(), MPFR_RNDN);
        if (mpfr_sgn(acc.get()) < 0) mpfr_add_ui(acc.get(), acc.get(), 1, MPFR_RNDN);
        mpfr_mul_2ui(acc.get(), acc.get(), 128, MPFR_RNDN);
        mpz_class z;
        mpfr_get_z(z.get_mpz_t(), acc.get(), MPFR_RNDD);
        fix_ = mpz_to_fix(z);  // 2^128 wraps to 0 in the mask
    }
    if (text_.empty()) {
        text_ = r_.get_str();
        for (auto& [m, c] : surds_) text_ += " + " + c.get_str() + "*sqrt(" + std::to_string(m) + ")";
    }
}

double Angle::value() const {
    double v = r_.get_d();
    for (auto& [m, c] : surds_) v += c.get_d() * std::sqrt(static_cast<double>(m));
    return v;
}

Angle operator+(const Angle& a, const Angle& b) {
    Surd s;
    s[1] = a.r_;
    for (auto& [m, c] : a.surds_) s[m] += c;
    for (auto& [m, c] : b.surds_) s[m] += c;
    Angle out;
    out.r_ = s[1] + b.r_;
    for (auto& [m, c] : s)
        if (m != 1 && c != 0) out.surds_.emplace_back(m, c);
    out.finish();
    return out;
}

Angle operator*(long k, const Angle& a) {
    Angle out;
    if (k == 0) {
        out.finish();
        return out;
    }
    out.r_ = a.r_ * k;
    for (auto& [m, c] : a.surds_) out.surds_.emplace_back(m, c * k);
    out.finish();
    return out;
}

bool integer_combination(const std::vector<Angle>& a, const std::vector<long>& k) {
    if (a.size() != k.size()) throw DomainError("integer_combination", "length mismatch");
    Angle s = Angle::rational(0);
    for (size_t i = 0; i < a.size(); ++i) s = s + k[i] * a[i];
    return s.is_rational() && s.rational_part().get_den() == 1;
}

bool rationally_independent(const std::vector<Angle>& a) {
    // coordinates in the basis {1, sqrt m}: rows (1,0..), a_1, ..., a_d must have full rank
    std::map<unsigned long, size_t> col{{1, 0}};
    for (auto& x : a)
        for (auto& [m, c] : x.surds()) col.emplace(m, 0);
    size_t j = 0;
    for (auto& [m, idx] : col) idx = j++;
    std::vector<std::vector<mpq_class>> rows;
    std::vector<mpq_class> one(col.size());
    one[0] = 1;
    rows.push_back(one);
    for (auto& x : a) {
        std::vector<mpq_class> r(col.size());
        r[0] = x.rational_part();
        for (auto& [m, c] : x.surds()) r[col[m]] = c;
        rows.push_back(r);
    }
    size_t rank = 0;
    for (size_t c = 0; c < col.size() && rank < rows.size(); ++c) {
        size_t piv = rank;
        while (piv < rows.size() && rows[piv][c] == 0) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[piv], rows[rank]);
        for (size_t r = 0; r < rows.size(); ++r) {
            if (r == rank || rows[r][c] == 0) continue;
            mpq_class f = rows[r][c] / rows[rank][c];
            for (size_t cc = c; cc < col.size(); ++cc) rows[r][cc] -= f * rows[rank][cc];
        }
        ++rank;
    }
    return rank == rows.size();
}

}  // namespace ergolab::dyn
