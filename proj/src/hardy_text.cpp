#include <cctype>

#include "ergolab/errors.hpp"
#include "ergolab/hardy.hpp"

namespace ergolab::hardy {

namespace {

std::string exponent_str(const Rational& r) {
    if (r.is_integer() && r.num() >= 0) return r.str();
    return "(" + r.str() + ")";
}

std::string monomial_body(const Key& k) {
    std::string s;
    if (!k.p.is_zero()) s = k.p == Rational(1) ? "t" : "t^" + exponent_str(k.p);
    if (!k.q.is_zero()) {
        if (!s.empty()) s += "*";
        s += k.q == Rational(1) ? "log(t)" : "log(t)^" + exponent_str(k.q);
    }
    return s;  // empty for the constant monomial
}

std::string atom_body(const Atom& a) {
    if (a.shift.is_zero()) return monomial_body(a.key);
    if (a.key.q.is_zero()) {
        std::string sh = a.shift.str();
        std::string inner = sh[0] == '-' ? "t - " + sh.substr(1) : "t + " + sh;
        return "(" + inner + ")^" + exponent_str(a.key.p);
    }
    std::string body = monomial_body(a.key);
    return "S[" + a.shift.str() + "]{" + body + "}";
}

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    HardyExpr run() {
        HardyExpr e = sum();
        skip();
        if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("hardy_core.parse", msg + " at column " + std::to_string(i_ + 1) + " in '" +
                                                 std::string(s_) + "'");
    }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool peek(char c) {
        skip();
        return i_ < s_.size() && s_[i_] == c;
    }
    bool accept(char c) {
        if (peek(c)) {
            ++i_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }
    bool accept_word(std::string_view w) {
        skip();
        if (s_.substr(i_, w.size()) == w) {
            std::size_t j = i_ + w.size();
            if (j < s_.size() && std::isalnum(static_cast<unsigned char>(s_[j]))) return false;
            i_ = j;
            return true;
        }
        return false;
    }

    std::string number_text() {
        skip();
        std::size_t st = i_;
        while (i_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.')) ++i_;
        if (st == i_) fail("expected number");
        return std::string(s_.substr(st, i_ - st));
    }

    mpq_class number() {
        Rational r = Rational::parse(number_text());
        mpq_class q(r.num(), r.den());
        q.canonicalize();
        return q;
    }

    Rational exponent() {
        skip();
        if (accept('(')) {
            bool neg = accept('-');
            std::string a = number_text();
            Rational r = Rational::parse(a);
            if (accept('/')) r = r / Rational::parse(number_text());
            expect(')');
            return neg ? -r : r;
        }
        bool neg = accept('-');
        Rational r = Rational::parse(number_text());
        return neg ? -r : r;
    }

    HardyExpr sum() {
        HardyExpr acc;
        bool neg = false;
        if (accept('-')) neg = true;
        else accept('+');
        HardyExpr first = product();
        acc = neg ? -first : first;
        while (true) {
            if (accept('+')) acc += product();
            else if (accept('-')) acc -= product();
            else break;
        }
        return acc;
    }

    static bool single_monomial(const HardyExpr& e) {
        return e.atoms().size() == 1 && e.atoms().begin()->first.shift.is_zero() &&
               e.atoms().begin()->second.is_constant();
    }

    HardyExpr multiply(const HardyExpr& a, const HardyExpr& b) {
        if (a.is_zero() || b.is_zero()) return {};
        if (a.is_scalar()) return b * a.atoms().begin()->second;
        if (b.is_scalar()) return a * b.atoms().begin()->second;
        const HardyExpr* mono = nullptr;
        const HardyExpr* other = nullptr;
        if (!a.has_shifted_atoms() && !b.has_shifted_atoms()) {
            HardyExpr r;
            for (auto& [x, cx] : a.atoms())
                for (auto& [y, cy] : b.atoms())
                    r += HardyExpr::monomial(cx * cy, x.key.p + y.key.p, x.key.q + y.key.q);
            return r;
        }
        if (single_monomial(a)) mono = &a, other = &b;
        else if (single_monomial(b)) mono = &b, other = &a;
        if (!mono) fail("product is outside the fragment");
        auto& [ma, mc] = *mono->atoms().begin();
        try {
            return multiply_monomial(*other, ma.key.p, ma.key.q) * mc;
        } catch (const NotInFragment&) {
            fail("product of a shifted function with a power of t is outside the fragment");
        }
    }

    HardyExpr product() {
        HardyExpr acc = power();
        while (true) {
            if (accept('*')) {
                acc = multiply(acc, power());
            } else if (peek('/')) {
                ++i_;
                HardyExpr d = power();
                if (!single_monomial(d)) fail("divisor must be a single monomial with constant coefficient");
                auto& [da, dc] = *d.atoms().begin();
                mpq_class inv = 1 / dc.constant();
                acc = multiply(acc, HardyExpr::monomial(ShiftPoly(inv), -da.key.p, -da.key.q));
            } else {
                break;
            }
        }
        return acc;
    }

    // t + sigma with sigma scalar: returns sigma
    static std::optional<ShiftPoly> as_t_plus_shift(const HardyExpr& e) {
        ShiftPoly sigma;
        bool has_t = false;
        for (auto& [a, c] : e.atoms()) {
            if (!a.shift.is_zero()) return std::nullopt;
            if (a.key == Key{Rational(1), Rational(0)} && c == ShiftPoly(1)) has_t = true;
            else if (a.key == Key{Rational(0), Rational(0)}) sigma = c;
            else return std::nullopt;
        }
        if (!has_t) return std::nullopt;
        return sigma;
    }

    HardyExpr raise(const HardyExpr& base, const Rational& ex) {
        if (base.is_scalar() && !base.is_zero()) {
            if (!ex.is_integer() || ex.num() < 0) fail("scalar powers must be nonnegative integers");
            return HardyExpr::constant(base.atoms().begin()->second.pow(static_cast<unsigned>(ex.num())));
        }
        if (auto sigma = as_t_plus_shift(base)) {
            return HardyExpr::shifted_monomial(ShiftPoly(1), ex, Rational(0), *sigma);
        }
        if (single_monomial(base)) {
            auto& [a, c] = *base.atoms().begin();
            if (!(c == ShiftPoly(1))) {
                if (!ex.is_integer() || ex.num() < 0) fail("coefficient raised to a non-integer power");
            }
            ShiftPoly cc = ex.is_integer() && ex.num() >= 0 ? c.pow(static_cast<unsigned>(ex.num())) : ShiftPoly(1);
            return HardyExpr::monomial(cc, a.key.p * ex, a.key.q * ex);
        }
        fail("power of this expression is outside the fragment");
    }

    HardyExpr power() {
        HardyExpr b = primary();
        if (accept('^')) return raise(b, exponent());
        return b;
    }

    HardyExpr primary() {
        skip();
        if (i_ >= s_.size()) fail("unexpected end of input");
        char c = s_[i_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return HardyExpr::constant(ShiftPoly(number()));
        if (accept('(')) {
            HardyExpr e = sum();
            expect(')');
            return e;
        }
        if (accept_word("log")) {
            expect('(');
            if (!accept_word("t")) fail("only log(t) is supported");
            expect(')');
            return HardyExpr::monomial(ShiftPoly(1), Rational(0), Rational(1));
        }
        if (accept_word("t")) return HardyExpr::t();
        if (peek('S') && i_ + 1 < s_.size() && s_[i_ + 1] == '[') {
            i_ += 2;
            HardyExpr sh = sum();
            expect(']');
            if (!sh.is_scalar()) fail("shift amount must be a number or symbol polynomial");
            ShiftPoly sigma = sh.is_zero() ? ShiftPoly() : sh.atoms().begin()->second;
            expect('{');
            HardyExpr body = sum();
            expect('}');
            return body.shifted(sigma);
        }
        if (peek('D') && i_ + 1 < s_.size() && s_[i_ + 1] == '{') {
            i_ += 2;
            HardyExpr body = sum();
            expect('}');
            return derivative(body);
        }
        if (c == 'h') {
            ++i_;
            std::uint32_t idx = 0;
            std::size_t st = i_;
            while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
                idx = idx * 10 + static_cast<std::uint32_t>(s_[i_] - '0');
                ++i_;
            }
            if (st != i_ && idx == 0) fail("symbol h0 is spelled h");
            if (i_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[i_]))) fail("unknown identifier");
            return HardyExpr::constant(ShiftPoly::symbol(idx));
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    std::string_view s_;
    std::size_t i_ = 0;
};

}  // namespace

std::string HardyExpr::str() const {
    if (atoms_.empty()) return "0";
    std::string s;
    bool first = true;
    for (auto& [a, c] : atoms_) {
        std::string body = atom_body(a);
        std::string piece;
        bool negative = false;
        if (c.is_constant()) {
            mpq_class v = c.constant();
            if (v < 0) {
                negative = true;
                v = -v;
            }
            if (body.empty()) piece = rational_str(v);
            else if (v == 1) piece = body;
            else piece = rational_str(v) + "*" + body;
        } else {
            piece = "(" + c.str() + ")";
            if (!body.empty()) piece += "*" + body;
        }
        if (first) s += negative ? "-" + piece : piece;
        else s += (negative ? " - " : " + ") + piece;
        first = false;
    }
    return s;
}

HardyExpr HardyExpr::parse(std::string_view text) { return Parser(text).run(); }

}  // namespace ergolab::hardy
