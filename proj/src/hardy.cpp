#include "ergolab/hardy.hpp"

#include <algorithm>
#include <functional>

#include "ergolab/errors.hpp"

namespace ergolab::hardy {

namespace {

mpq_class to_mpq(const Rational& r) {
    mpq_class q(r.num(), r.den());
    q.canonicalize();
    return q;
}

mpz_class binomial(unsigned n, unsigned k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

// gamma[k][j] = C(q,j) * [u^k] (1+u)^p log(1+u)^j
class GammaCache {
public:
    const std::vector<std::vector<mpq_class>>& get(const Key& key, int K) {
        auto& slot = cache_[key];
        if (static_cast<int>(slot.size()) < K) slot = compute(key, std::max(K, 2 * static_cast<int>(slot.size())));
        return slot;
    }

private:
    static std::vector<std::vector<mpq_class>> compute(const Key& key, int K) {
        mpq_class p = to_mpq(key.p), q = to_mpq(key.q);
        std::vector<mpq_class> bp(K);
        bp[0] = 1;
        for (int k = 1; k < K; ++k) bp[k] = bp[k - 1] * (p - (k - 1)) / k;
        std::vector<mpq_class> L(K, 0);
        for (int i = 1; i < K; ++i) L[i] = mpq_class(i % 2 == 1 ? 1 : -1, i);
        // logpow[j] = L^j truncated
        std::vector<std::vector<mpq_class>> logpow(K, std::vector<mpq_class>(K, 0));
        logpow[0][0] = 1;
        for (int j = 1; j < K; ++j)
            for (int a = 0; a < K; ++a) {
                if (logpow[j - 1][a] == 0) continue;
                for (int b = 1; a + b < K; ++b) logpow[j][a + b] += logpow[j - 1][a] * L[b];
            }
        std::vector<mpq_class> cq(K);
        cq[0] = 1;
        for (int j = 1; j < K; ++j) cq[j] = cq[j - 1] * (q - (j - 1)) / j;
        std::vector<std::vector<mpq_class>> g(K);
        for (int k = 0; k < K; ++k) {
            g[k].assign(k + 1, 0);
            for (int j = 0; j <= k; ++j) {
                if (cq[j] == 0) continue;
                mpq_class s = 0;
                for (int i = j; i <= k; ++i) s += bp[k - i] * logpow[j][i];
                g[k][j] = cq[j] * s;
            }
        }
        return g;
    }
    std::map<Key, std::vector<std::vector<mpq_class>>> cache_;
};

GammaCache& gamma_cache() {
    thread_local GammaCache c;
    return c;
}

using TermMap = std::map<Key, ShiftPoly, std::greater<Key>>;

Expansion expand_impl(const HardyExpr& e, const std::function<int(const Key&)>& orders) {
    TermMap acc;
    std::optional<Key> trunc;
    std::map<ShiftPoly, std::vector<ShiftPoly>> powers;
    for (const auto& [atom, coef] : e.atoms()) {
        if (atom.shift.is_zero()) {
            acc[atom.key] += coef;
            continue;
        }
        int K = std::max(1, orders(atom.key));
        const auto& g = gamma_cache().get(atom.key, K);
        auto& pw = powers[atom.shift];
        if (pw.empty()) pw.push_back(ShiftPoly(1));
        while (static_cast<int>(pw.size()) < K) pw.push_back(pw.back() * atom.shift);
        for (int k = 0; k < K; ++k) {
            ShiftPoly base = coef * pw[k];
            for (int j = 0; j <= k; ++j) {
                if (g[k][j] == 0) continue;
                acc[Key{atom.key.p - Rational(k), atom.key.q - Rational(j)}] += base * g[k][j];
            }
        }
        Key tk{atom.key.p - Rational(K), atom.key.q};
        if (!trunc || tk > *trunc) trunc = tk;
    }
    Expansion out;
    out.trunc = trunc;
    for (auto& [k, c] : acc) {
        if (c.is_zero()) continue;
        if (trunc && !(k > *trunc)) continue;
        out.terms.push_back({c, k});
    }
    return out;
}

}  // namespace

std::string Key::str() const { return "(" + p.str() + ", " + q.str() + ")"; }

std::string Expansion::str() const {
    std::string s;
    for (auto& t : terms) {
        if (!s.empty()) s += " + ";
        s += "(" + t.coef.str() + ")*t^(" + t.key.p.str() + ")*log(t)^(" + t.key.q.str() + ")";
    }
    if (s.empty()) s = "0";
    if (trunc) s += " + o(t^(" + trunc->p.str() + ")*log(t)^(" + trunc->q.str() + "))";
    return s;
}

// ---- HardyExpr ----

HardyExpr HardyExpr::constant(const ShiftPoly& c) { return monomial(c, Rational(0), Rational(0)); }

HardyExpr HardyExpr::monomial(const ShiftPoly& c, Rational p, Rational q) {
    HardyExpr e;
    e.add_atom(Atom{Key{p, q}, ShiftPoly()}, c);
    return e;
}

HardyExpr HardyExpr::shifted_monomial(const ShiftPoly& c, Rational p, Rational q, const ShiftPoly& shift) {
    HardyExpr e;
    e.add_atom(Atom{Key{p, q}, shift}, c);
    return e;
}

void HardyExpr::add_atom(const Atom& a, const ShiftPoly& c) {
    if (c.is_zero()) return;
    if (a.key.is_polynomial() && !a.shift.is_zero()) {
        auto n = static_cast<unsigned>(a.key.p.num());
        ShiftPoly pw(1);
        for (unsigned k = 0; k <= n; ++k) {
            mpz_class b = binomial(n, k);
            add_atom(Atom{Key{Rational(static_cast<std::int64_t>(n - k)), Rational(0)}, ShiftPoly()},
                     c * pw * mpq_class(b));
            pw = pw * a.shift;
        }
        return;
    }
    auto it = atoms_.find(a);
    if (it == atoms_.end()) {
        atoms_.emplace(a, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) atoms_.erase(it);
    }
}

bool HardyExpr::is_scalar() const {
    return atoms_.empty() || (atoms_.size() == 1 && atoms_.begin()->first.key == Key{Rational(0), Rational(0)});
}

bool HardyExpr::has_shifted_atoms() const {
    return std::any_of(atoms_.begin(), atoms_.end(), [](auto& kv) { return !kv.first.shift.is_zero(); });
}

std::set<std::uint32_t> HardyExpr::symbols() const {
    std::set<std::uint32_t> s;
    for (auto& [a, c] : atoms_) {
        auto x = a.shift.symbols();
        s.insert(x.begin(), x.end());
        auto y = c.symbols();
        s.insert(y.begin(), y.end());
    }
    return s;
}

std::set<std::uint32_t> HardyExpr::shift_symbols() const { return symbols(); }

Rational HardyExpr::max_power() const {
    if (atoms_.empty()) return Rational(0);
    Rational m = atoms_.begin()->first.key.p;  // map is ordered by key descending
    return m;
}

HardyExpr HardyExpr::shifted(const ShiftPoly& offset) const {
    if (offset.is_zero()) return *this;
    HardyExpr r;
    for (auto& [a, c] : atoms_) r.add_atom(Atom{a.key, a.shift + offset}, c);
    return r;
}

HardyExpr HardyExpr::operator-() const {
    HardyExpr r = *this;
    for (auto& [a, c] : r.atoms_) c = -c;
    return r;
}

HardyExpr& HardyExpr::operator+=(const HardyExpr& o) {
    for (auto& [a, c] : o.atoms_) add_atom(a, c);
    return *this;
}

HardyExpr& HardyExpr::operator-=(const HardyExpr& o) {
    for (auto& [a, c] : o.atoms_) add_atom(a, -c);
    return *this;
}

HardyExpr operator+(const HardyExpr& a, const HardyExpr& b) {
    HardyExpr r = a;
    r += b;
    return r;
}

HardyExpr operator-(const HardyExpr& a, const HardyExpr& b) {
    HardyExpr r = a;
    r -= b;
    return r;
}

HardyExpr operator*(const HardyExpr& a, const ShiftPoly& c) {
    HardyExpr r;
    if (c.is_zero()) return r;
    for (auto& [at, co] : a.atoms_) r.add_atom(at, co * c);
    return r;
}

bool operator==(const HardyExpr& a, const HardyExpr& b) {
    if (a.atoms_.size() != b.atoms_.size()) return false;
    auto i = a.atoms_.begin();
    auto j = b.atoms_.begin();
    for (; i != a.atoms_.end(); ++i, ++j) {
        if (i->first.key != j->first.key || !(i->first.shift == j->first.shift) || !(i->second == j->second))
            return false;
    }
    return true;
}

// ---- operations ----

HardyExpr canonicalize(const HardyExpr& e) { return e; }

Expansion canonicalize(std::vector<Term> terms, std::optional<Key> trunc) {
    TermMap acc;
    for (auto& t : terms) acc[t.key] += t.coef;
    Expansion out;
    out.trunc = trunc;
    for (auto& [k, c] : acc) {
        if (c.is_zero()) continue;
        if (trunc && !(k > *trunc)) continue;
        out.terms.push_back({c, k});
    }
    return out;
}

Expansion expand(const HardyExpr& e, int order) {
    if (order < 1) throw DomainError("hardy_core.shift", "order must be positive");
    return expand_impl(e, [order](const Key&) { return order; });
}

Expansion expand_to(const HardyExpr& e, Rational stop_p) {
    return expand_impl(e, [&](const Key& k) { return static_cast<int>((k.p - stop_p).floor()) + 1; });
}

Expansion shift(const HardyExpr& e, const ShiftPoly& offset, int order) { return expand(e.shifted(offset), order); }

HardyExpr derivative(const HardyExpr& e) {
    HardyExpr r;
    for (auto& [a, c] : e.atoms()) {
        const Rational one(1);
        if (!a.key.p.is_zero())
            r += HardyExpr::shifted_monomial(c * to_mpq(a.key.p), a.key.p - one, a.key.q, a.shift);
        if (!a.key.q.is_zero())
            r += HardyExpr::shifted_monomial(c * to_mpq(a.key.q), a.key.p - one, a.key.q - one, a.shift);
    }
    return r;
}

HardyExpr combine(const std::vector<long>& coeffs, const std::vector<HardyExpr>& exprs) {
    if (coeffs.size() != exprs.size()) throw DomainError("hardy_core.combine", "length mismatch");
    HardyExpr r;
    for (std::size_t i = 0; i < coeffs.size(); ++i) r += exprs[i] * ShiftPoly(coeffs[i]);
    return r;
}

HardyExpr multiply_monomial(const HardyExpr& e, Rational p, Rational q) {
    HardyExpr r;
    for (auto& [a, c] : e.atoms()) {
        if (!a.shift.is_zero())
            throw NotInFragment("hardy_core", "product of a shifted atom with a monomial is outside the fragment");
        r += HardyExpr::monomial(c, a.key.p + p, a.key.q + q);
    }
    return r;
}

HardyExpr instantiate(const HardyExpr& e, const std::map<std::uint32_t, mpq_class>& values) {
    HardyExpr r;
    for (auto& [a, c] : e.atoms()) {
        ShiftPoly s(a.shift.evaluate(values));
        r += HardyExpr::shifted_monomial(ShiftPoly(c.evaluate(values)), a.key.p, a.key.q, s);
    }
    return r;
}

HardyExpr substitute(const HardyExpr& e, std::uint32_t var, const mpq_class& value) {
    HardyExpr r;
    for (auto& [a, c] : e.atoms())
        r += HardyExpr::shifted_monomial(c.substitute(var, value), a.key.p, a.key.q, a.shift.substitute(var, value));
    return r;
}

bool in_shift_family(const HardyExpr& e, const HardyExpr& base) {
    if (e.is_zero()) return true;
    if (base.has_shifted_atoms()) return false;
    const Atom* ref = nullptr;
    const ShiftPoly* ref_coef = nullptr;
    for (auto& [a, c] : base.atoms())
        if (!a.key.is_polynomial()) {
            ref = &a;
            ref_coef = &c;
            break;
        }
    if (!ref || !ref_coef->is_constant()) return false;
    // multiplicity of each shift, read off the reference atom
    std::vector<std::pair<ShiftPoly, mpz_class>> mult;
    for (auto& [a, c] : e.atoms()) {
        if (a.key != ref->key) continue;
        if (!c.is_constant()) return false;
        mpq_class k = c.constant() / ref_coef->constant();
        if (k.get_den() != 1) return false;
        mult.emplace_back(a.shift, k.get_num());
    }
    HardyExpr candidate;
    for (auto& [sigma, k] : mult) candidate += base.shifted(sigma) * ShiftPoly(mpq_class(k));
    return candidate == e;
}

namespace {

// Walks the expansion one power level p - k at a time, highest first, so the
// leading term costs only as many orders as the cancellation needs.
class LevelStream {
public:
    explicit LevelStream(const HardyExpr& e) {
        for (auto& [a, c] : e.atoms()) atoms_.push_back({&a, &c, 0});
    }

    // fills `out` with the nonzero terms of the next level; false when exhausted
    bool next(Rational& level, TermMap& out) {
        out.clear();
        bool any = false;
        for (auto& s : atoms_) {
            if (s.done) continue;
            Rational l = s.atom->key.p - Rational(s.k);
            if (!any || l > level) level = l;
            any = true;
        }
        if (!any) return false;
        for (auto& s : atoms_) {
            if (s.done || s.atom->key.p - Rational(s.k) != level) continue;
            const Key& key = s.atom->key;
            if (s.atom->shift.is_zero()) {
                out[key] += *s.coef;
                s.done = true;
                continue;
            }
            const auto& g = gamma_cache().get(key, s.k + 1);
            const ShiftPoly& pw = power(s.atom->shift, s.k);
            ShiftPoly base = s.coef->is_constant() ? pw * s.coef->constant() : *s.coef * pw;
            for (int j = 0; j <= s.k; ++j)
                if (g[s.k][j] != 0) out[Key{level, key.q - Rational(j)}] += base * g[s.k][j];
            ++s.k;
        }
        for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
        return true;
    }

private:
    struct State {
        const Atom* atom;
        const ShiftPoly* coef;
        int k;
        bool done = false;
    };
    const ShiftPoly& power(const ShiftPoly& s, int k) {
        auto& pw = powers_[s];
        if (pw.empty()) pw.push_back(ShiftPoly(1));
        while (static_cast<int>(pw.size()) <= k) pw.push_back(pw.back() * s);
        return pw[k];
    }
    std::vector<State> atoms_;
    std::map<ShiftPoly, std::vector<ShiftPoly>> powers_;
};

}  // namespace

std::optional<LeadingTerm> leading_term(const HardyExpr& e) {
    if (e.is_zero()) return std::nullopt;
    if (!e.has_shifted_atoms()) {
        auto& [a, c] = *e.atoms().begin();
        return LeadingTerm{c, a.key};
    }
    const Rational floor_level = e.max_power() - Rational(64);
    LevelStream st(e);
    Rational level;
    TermMap terms;
    while (st.next(level, terms)) {
        if (level < floor_level) break;
        if (!terms.empty()) return LeadingTerm{terms.begin()->second, terms.begin()->first};
    }
    throw PrecisionExhausted("hardy_core.leading_term", "all terms cancel through 64 orders: " + e.str());
}

std::optional<mpq_class> GrowthComparison::ratio() const {
    if (rel != Relation::Similar || !ratio_num.is_constant() || !ratio_den.is_constant()) return std::nullopt;
    return mpq_class(ratio_num.constant() / ratio_den.constant());
}

GrowthComparison compare_growth(const HardyExpr& a, const HardyExpr& b) {
    auto la = leading_term(a);
    auto lb = leading_term(b);
    if (!la || !lb) throw DomainError("hardy_core.compare_growth", "exact zero argument");
    if (la->key < lb->key) return {Relation::Less, {}, {}};
    if (la->key > lb->key) return {Relation::Greater, {}, {}};
    return {Relation::Similar, la->coef, lb->coef};
}

int degree_of_key(const Key& k) {
    int d;
    if (!k.p.is_integer()) {
        d = static_cast<int>(k.p.floor());
    } else if (k.q >= Rational(0)) {
        d = static_cast<int>(k.p.num());
    } else {
        d = static_cast<int>(k.p.num()) - 1;
    }
    if (k < Key{Rational(0), Rational(0)}) d = -1;
    return std::max(d, -1);
}

int degree(const HardyExpr& e) {
    auto lt = leading_term(e);
    return lt ? degree_of_key(lt->key) : -1;
}

GrowthClass growth_class(const HardyExpr& e) {
    auto lt = leading_term(e);
    const Key one{Rational(0), Rational(0)};
    if (!lt || lt->key < one) return {GrowthTag::Vanishing, -1};
    if (lt->key == one) return {GrowthTag::BoundedNonvanishing, 0};
    return {GrowthTag::Unbounded, degree_of_key(lt->key)};
}

bool is_bounded(const HardyExpr& e) {
    if (e.is_zero()) return true;
    const Key one{Rational(0), Rational(0)};
    if (!e.has_shifted_atoms()) return e.atoms().begin()->first.key <= one;
    // no need to resolve cancellations below level 0
    LevelStream st(e);
    Rational level;
    TermMap terms;
    while (st.next(level, terms)) {
        if (level < Rational(0)) return true;
        if (!terms.empty()) return terms.begin()->first <= one;
    }
    return true;
}

bool equivalent(const HardyExpr& a, const HardyExpr& b, std::string* note) {
    if (is_bounded(a) || is_bounded(b)) {
        if (note) *note = "degenerate: equivalence applied to a bounded function";
        return false;
    }
    int m = std::min(degree(a), degree(b));
    return degree(a - b) < m;
}

std::vector<Term> equivalence_head(const HardyExpr& e, int d) {
    Expansion ex = expand_to(e, Rational(d));
    std::vector<Term> head;
    const Key floor_key{Rational(d), Rational(0)};
    for (auto& t : ex.terms)
        if (t.key >= floor_key) head.push_back(t);
    return head;
}

bool in_class_G(const HardyExpr& e) {
    auto lt = leading_term(e);
    if (!lt) return false;
    int d = degree_of_key(lt->key);
    if (d < 0) return false;
    return lt->key > Key{Rational(d), Rational(1)};
}

bool different_growth(const std::vector<HardyExpr>& list) {
    std::set<Key> keys;
    for (auto& e : list) {
        auto lt = leading_term(e);
        if (!lt) return false;
        if (!keys.insert(lt->key).second) return false;
    }
    return true;
}

ShiftComboCoeffs shift_combo_coeffs(const HardyExpr& base, const std::vector<ShiftCombo>& combo) {
    if (!in_class_G(base)) throw DomainError("hardy_core.shift_combo_coeffs", "base is not in class G");
    int d = degree(base);
    ShiftComboCoeffs out;
    out.c.assign(d + 1, 0);
    mpz_class fact = 1;
    for (int j = 0; j <= d; ++j) {
        if (j > 0) fact *= j;
        mpq_class s = 0;
        for (auto& [k, h] : combo) {
            mpz_class hp;
            mpz_pow_ui(hp.get_mpz_t(), mpz_class(h).get_mpz_t(), j);
            s += mpq_class(k) * mpq_class(hp);
        }
        out.c[j] = s / mpq_class(fact);
    }
    out.first_nonzero = -1;
    for (int j = 0; j <= d; ++j)
        if (out.c[j] != 0) {
            out.first_nonzero = j;
            break;
        }
    out.vanishing = out.first_nonzero < 0;
    return out;
}

HardyExpr apply_combo(const HardyExpr& base, const std::vector<ShiftCombo>& combo) {
    HardyExpr r;
    for (auto& [k, h] : combo) r += base.shifted(ShiftPoly(h)) * ShiftPoly(k);
    return r;
}

}  // namespace ergolab::hardy
