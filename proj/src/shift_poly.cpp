#include "ergolab/shift_poly.hpp"

#include <algorithm>

#include "ergolab/errors.hpp"

namespace ergolab {

namespace {

std::uint32_t mono_degree(const ShiftPoly::Monomial& m) {
    std::uint32_t d = 0;
    for (auto& [v, e] : m) d += e;
    return d;
}

ShiftPoly::Monomial mono_mul(const ShiftPoly::Monomial& a, const ShiftPoly::Monomial& b) {
    ShiftPoly::Monomial r;
    r.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            r.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            r.push_back(b[j++]);
        } else {
            r.emplace_back(a[i].first, a[i].second + b[j].second);
            ++i;
            ++j;
        }
    }
    return r;
}

}  // namespace

bool monomial_before(const ShiftPoly::Monomial& a, const ShiftPoly::Monomial& b) {
    auto da = mono_degree(a), db = mono_degree(b);
    if (da != db) return da > db;
    // lower variable index with larger exponent first
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        if (a[i].first != b[i].first) return a[i].first < b[i].first;
        if (a[i].second != b[i].second) return a[i].second > b[i].second;
    }
    return a.size() < b.size();
}

std::string rational_str(const mpq_class& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

ShiftPoly::ShiftPoly(const mpq_class& c) {
    if (c != 0) terms_.push_back({{}, c});
}

ShiftPoly ShiftPoly::symbol(std::uint32_t var) {
    ShiftPoly p;
    p.terms_.push_back({{{var, 1}}, mpq_class(1)});
    return p;
}

mpq_class ShiftPoly::constant() const {
    if (!terms_.empty() && terms_.back().mono.empty()) return terms_.back().coef;
    return 0;
}

std::uint32_t ShiftPoly::total_degree() const {
    return terms_.empty() ? 0 : mono_degree(terms_.front().mono);
}

std::set<std::uint32_t> ShiftPoly::symbols() const {
    std::set<std::uint32_t> s;
    for (auto& t : terms_)
        for (auto& [v, e] : t.mono) s.insert(v);
    return s;
}

void ShiftPoly::normalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& a, const Term& b) { return monomial_before(a.mono, b.mono); });
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (auto& t : terms_) {
        if (!out.empty() && out.back().mono == t.mono) {
            out.back().coef += t.coef;
        } else {
            out.push_back(std::move(t));
        }
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const Term& t) { return t.coef == 0; }), out.end());
    terms_ = std::move(out);
}

ShiftPoly ShiftPoly::operator-() const {
    ShiftPoly r = *this;
    for (auto& t : r.terms_) t.coef = -t.coef;
    return r;
}

ShiftPoly operator+(const ShiftPoly& a, const ShiftPoly& b) {
    ShiftPoly r;
    r.terms_.reserve(a.terms_.size() + b.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < a.terms_.size() || j < b.terms_.size()) {
        if (j == b.terms_.size() ||
            (i < a.terms_.size() && monomial_before(a.terms_[i].mono, b.terms_[j].mono))) {
            r.terms_.push_back(a.terms_[i++]);
        } else if (i == a.terms_.size() || monomial_before(b.terms_[j].mono, a.terms_[i].mono)) {
            r.terms_.push_back(b.terms_[j++]);
        } else {
            mpq_class c = a.terms_[i].coef + b.terms_[j].coef;
            if (c != 0) r.terms_.push_back({a.terms_[i].mono, c});
            ++i;
            ++j;
        }
    }
    return r;
}

ShiftPoly operator-(const ShiftPoly& a, const ShiftPoly& b) { return a + (-b); }

ShiftPoly operator*(const ShiftPoly& a, const ShiftPoly& b) {
    ShiftPoly r;
    if (a.is_zero() || b.is_zero()) return r;
    r.terms_.reserve(a.terms_.size() * b.terms_.size());
    for (auto& x : a.terms_)
        for (auto& y : b.terms_) r.terms_.push_back({mono_mul(x.mono, y.mono), x.coef * y.coef});
    r.normalize();
    return r;
}

ShiftPoly operator*(const ShiftPoly& a, const mpq_class& c) {
    if (c == 0) return {};
    ShiftPoly r = a;
    for (auto& t : r.terms_) t.coef *= c;
    return r;
}

ShiftPoly ShiftPoly::pow(unsigned k) const {
    ShiftPoly r(mpq_class(1)), base = *this;
    while (k) {
        if (k & 1u) r = r * base;
        k >>= 1u;
        if (k) base = base * base;
    }
    return r;
}

mpq_class ShiftPoly::evaluate(const std::map<std::uint32_t, mpq_class>& values) const {
    mpq_class sum = 0;
    for (auto& t : terms_) {
        mpq_class v = t.coef;
        for (auto& [var, e] : t.mono) {
            auto it = values.find(var);
            if (it == values.end()) throw DomainError("shift_poly", "no value for symbol " + symbol_name(var));
            mpq_class p = 1;
            for (std::uint32_t i = 0; i < e; ++i) p *= it->second;
            v *= p;
        }
        sum += v;
    }
    return sum;
}

ShiftPoly ShiftPoly::substitute(std::uint32_t var, const mpq_class& value) const {
    ShiftPoly r;
    for (auto& t : terms_) {
        Term nt{{}, t.coef};
        for (auto& [v, e] : t.mono) {
            if (v != var) {
                nt.mono.emplace_back(v, e);
                continue;
            }
            for (std::uint32_t i = 0; i < e; ++i) nt.coef *= value;
        }
        r.terms_.push_back(std::move(nt));
    }
    r.normalize();
    return r;
}

bool operator==(const ShiftPoly& a, const ShiftPoly& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i)
        if (a.terms_[i].mono != b.terms_[i].mono || a.terms_[i].coef != b.terms_[i].coef) return false;
    return true;
}

bool operator<(const ShiftPoly& a, const ShiftPoly& b) {
    std::size_t n = std::min(a.terms_.size(), b.terms_.size());
    for (std::size_t i = 0; i < n; ++i) {
        auto& x = a.terms_[i];
        auto& y = b.terms_[i];
        if (x.mono != y.mono) return monomial_before(x.mono, y.mono);
        if (x.coef != y.coef) return x.coef < y.coef;
    }
    return a.terms_.size() < b.terms_.size();
}

std::string ShiftPoly::symbol_name(std::uint32_t var) {
    return var == 0 ? std::string("h") : "h" + std::to_string(var);
}

std::string ShiftPoly::str() const {
    if (terms_.empty()) return "0";
    std::string s;
    bool first = true;
    for (auto& t : terms_) {
        mpq_class c = t.coef;
        if (first) {
            if (c < 0) {
                s += "-";
                c = -c;
            }
        } else {
            s += c < 0 ? " - " : " + ";
            if (c < 0) c = -c;
        }
        first = false;
        bool unit = c == 1 && !t.mono.empty();
        if (!unit) s += rational_str(c);
        for (std::size_t i = 0; i < t.mono.size(); ++i) {
            if (!unit || i > 0) s += "*";
            s += symbol_name(t.mono[i].first);
            if (t.mono[i].second > 1) s += "^" + std::to_string(t.mono[i].second);
        }
    }
    return s;
}

}  // namespace ergolab
