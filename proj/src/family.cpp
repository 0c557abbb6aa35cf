#include "ergolab/family.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace ergolab::reduction {

using hardy::Key;
using hardy::LeadingTerm;

namespace {

const Key kOne{Rational(0), Rational(0)};

struct EntryInfo {
    std::optional<LeadingTerm> lt;
    bool bounded = true;
    int deg = -1;
};

EntryInfo info_of(const HardyExpr& e) {
    EntryInfo in;
    in.lt = hardy::leading_term(e);
    if (!in.lt) return in;
    in.bounded = in.lt->key <= kOne;
    in.deg = hardy::degree_of_key(in.lt->key);
    return in;
}

using Head = std::vector<hardy::Term>;

bool same_head(const Head& a, const Head& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].key != b[i].key || !(a[i].coef == b[i].coef)) return false;
    return true;
}

// per-family cache of leading data; entries are indexed [tuple][row]
struct Analysis {
    std::vector<std::vector<EntryInfo>> e;
    std::map<std::pair<std::size_t, std::size_t>, Head> heads;
    Analysis() = default;
    explicit Analysis(const TupleFamily& f) {
        e.resize(f.tuples.size());
        for (std::size_t j = 0; j < f.tuples.size(); ++j)
            for (auto& x : f.tuples[j]) e[j].push_back(info_of(x));
    }
    // terms down to (deg, 0) of an unbounded entry
    const Head& head(const TupleFamily& f, std::size_t j, std::size_t i) {
        auto [it, fresh] = heads.try_emplace({j, i});
        if (fresh) it->second = hardy::equivalence_head(f.tuples[j][i], e[j][i].deg);
        return it->second;
    }
    bool equivalent(const TupleFamily& f, std::size_t j, std::size_t k, std::size_t i) {
        if (e[j][i].bounded || e[k][i].bounded || e[j][i].deg != e[k][i].deg) return false;
        return same_head(head(f, j, i), head(f, k, i));
    }
};

std::vector<std::size_t> prime_idx(const TupleFamily& f, const Analysis& an, std::size_t i) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < f.tuples.size(); ++j) {
        bool earlier_bounded = true;
        for (std::size_t r = 0; r + 1 < i; ++r) earlier_bounded = earlier_bounded && an.e[j][r].bounded;
        if (earlier_bounded && !an.e[j][i - 1].bounded) out.push_back(j);
    }
    return out;
}

struct HeadLess {
    bool operator()(const std::vector<hardy::Term>& a, const std::vector<hardy::Term>& b) const {
        std::size_t n = std::min(a.size(), b.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (a[i].key != b[i].key) return a[i].key > b[i].key;
            if (!(a[i].coef == b[i].coef)) return a[i].coef < b[i].coef;
        }
        return a.size() < b.size();
    }
};

TypeMatrix type_of(const TupleFamily& f, Analysis& an, int d) {
    TypeMatrix w;
    w.d = d;
    w.w.assign(f.ell, std::vector<int>(static_cast<std::size_t>(d) + 1, 0));
    for (std::size_t i = 1; i <= f.ell; ++i) {
        std::map<int, std::set<std::vector<hardy::Term>, HeadLess>> classes;
        for (std::size_t j : prime_idx(f, an, i)) {
            int dg = an.e[j][i - 1].deg;
            if (dg > d) throw DomainError("type_matrix", "entry degree exceeds the matrix shape");
            classes[dg].insert(an.head(f, j, i - 1));
        }
        for (auto& [dg, s] : classes) w.w[i - 1][static_cast<std::size_t>(d - dg)] = static_cast<int>(s.size());
    }
    return w;
}

// a < b in growth, where zero is below everything
bool less_growth(const EntryInfo& a, const EntryInfo& b) {
    if (!b.lt) return false;
    if (!a.lt) return true;
    return a.lt->key < b.lt->key;
}

bool leq_growth(const EntryInfo& a, const EntryInfo& b) {
    if (!a.lt) return true;
    if (!b.lt) return false;
    return a.lt->key <= b.lt->key;
}

std::string at(std::size_t i, std::size_t j) {
    return "a[" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "]";
}

NiceReport nice_of(const TupleFamily& f, const Analysis& an, bool check_membership) {
    NiceReport r;
    auto fail = [&](std::string s) {
        r.nice = false;
        r.violations.push_back(std::move(s));
    };
    if (f.tuples.empty()) return r;
    if (check_membership && !f.bases.empty()) {
        for (std::size_t i = 0; i < f.ell; ++i) {
            if (!hardy::in_class_G(f.bases[i])) fail("base " + std::to_string(i + 1) + " is not in G");
            for (std::size_t j = 0; j < f.tuples.size(); ++j)
                if (!hardy::in_shift_family(f.tuples[j][i], f.bases[i]))
                    fail(at(i, j) + " is not an integer combination of shifts of its base");
        }
    }
    const EntryInfo& a11 = an.e[0][0];
    if (a11.bounded) {
        fail("a[1,1] is bounded");
        return r;
    }
    std::vector<EntryInfo> d1(f.tuples.size());
    for (std::size_t j = 1; j < f.tuples.size(); ++j) {
        d1[j] = info_of(f.tuples[0][0] - f.tuples[j][0]);
        if (d1[j].bounded) fail("(1) " + at(0, 0) + " - " + at(0, j) + " is bounded");
        if (!leq_growth(an.e[j][0], a11)) fail("(1) " + at(0, j) + " grows faster than a[1,1]");
    }
    for (std::size_t i = 1; i < f.ell; ++i) {
        for (std::size_t j = 0; j < f.tuples.size(); ++j)
            if (!less_growth(an.e[j][i], a11)) fail("(2) " + at(i, j) + " does not grow slower than a[1,1]");
        for (std::size_t j = 1; j < f.tuples.size(); ++j) {
            if (d1[j].bounded) continue;
            EntryInfo di = info_of(f.tuples[0][i] - f.tuples[j][i]);
            if (!less_growth(di, d1[j]))
                fail("(3) " + at(i, 0) + " - " + at(i, j) + " does not grow slower than " + at(0, 0) + " - " + at(0, j));
        }
    }
    return r;
}

std::size_t first_symbols(const HardyExpr& e) { return e.symbols().size(); }

Anchor choose(const TupleFamily& f, Analysis& an) {
    if (an.e[0][0].deg < 1) throw DegreeZero("choose_reduction_tuple", "deg a[1,1] < 1");
    for (std::size_t i = f.ell; i >= 2; --i) {
        auto idx = prime_idx(f, an, i);
        if (idx.empty()) continue;
        std::size_t best = idx[0];
        for (std::size_t j : idx)
            if (an.e[j][i - 1].deg < an.e[best][i - 1].deg) best = j;
        Anchor a;
        a.row = i;
        a.source = best;
        a.coords.assign(f.ell, HardyExpr());
        for (std::size_t r = i - 1; r < f.ell; ++r) a.coords[r] = f.tuples[best][r];
        a.rule = "row " + std::to_string(i) + " prime entry of minimal degree";
        return a;
    }
    Anchor a;
    a.row = 1;
    if (f.tuples.size() == 1) {
        a.source = 0;
        a.rule = "single tuple";
    } else {
        std::vector<std::size_t> other;
        for (std::size_t j = 1; j < f.tuples.size(); ++j)
            if (!an.e[j][0].bounded && !an.equivalent(f, j, 0, 0)) other.push_back(j);
        if (other.empty()) {
            // all first coordinates equivalent to a[1,1]: fewest formal symbols, then lowest index
            std::size_t best = 0;
            for (std::size_t j = 1; j < f.tuples.size(); ++j)
                if (first_symbols(f.tuples[j][0]) < first_symbols(f.tuples[best][0])) best = j;
            a.source = best;
            a.rule = "all first coordinates equivalent";
        } else {
            std::size_t best = other[0];
            for (std::size_t j : other)
                if (an.e[j][0].deg < an.e[best][0].deg) best = j;
            a.source = best;
            a.rule = "non-equivalent first coordinate of minimal degree";
        }
    }
    a.coords = f.tuples[a.source];
    return a;
}

bool all_bounded(const Tuple& t) {
    return std::all_of(t.begin(), t.end(), [](const HardyExpr& x) { return hardy::is_bounded(x); });
}

}  // namespace

int TupleFamily::degree() const {
    int d = -1;
    for (auto& t : tuples)
        for (auto& x : t) d = std::max(d, hardy::degree(x));
    return d;
}

void TupleFamily::validate() const {
    if (ell < 1) throw DomainError("TupleFamily", "ell must be at least 1");
    if (!bases.empty() && bases.size() != ell) throw DomainError("TupleFamily", "need one base per coordinate");
    for (std::size_t j = 0; j < tuples.size(); ++j) {
        if (tuples[j].size() != ell)
            throw DomainError("TupleFamily", "tuple " + std::to_string(j + 1) + " has the wrong length");
        if (all_bounded(tuples[j]))
            throw DomainError("TupleFamily", "tuple " + std::to_string(j + 1) + " consists of bounded functions");
    }
}

std::string format_tuple(const Tuple& t) {
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) s += ", ";
        s += t[i].str();
    }
    return s + ")";
}

std::string TupleFamily::str() const {
    std::string s = "[";
    for (std::size_t j = 0; j < tuples.size(); ++j) {
        if (j) s += "; ";
        s += format_tuple(tuples[j]);
    }
    s += "]";
    if (!bases.empty()) s += " bases: " + format_tuple(bases);
    return s;
}

std::string TypeMatrix::str() const {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) os << " /";
        for (std::size_t j = 0; j < w[i].size(); ++j) os << (i == 0 && j == 0 ? "" : " ") << w[i][j];
    }
    os << ")";
    return os.str();
}

std::vector<std::size_t> prime_indices(const TupleFamily& f, std::size_t i) {
    if (i < 1 || i > f.ell) throw DomainError("prime_subfamily", "row out of range");
    return prime_idx(f, Analysis(f), i);
}

std::vector<HardyExpr> prime_subfamily(const TupleFamily& f, std::size_t i) {
    std::vector<HardyExpr> out;
    for (std::size_t j : prime_indices(f, i)) out.push_back(f.tuples[j][i - 1]);
    return out;
}

TypeMatrix type_matrix(const TupleFamily& f, int d) {
    if (d < 0) d = std::max(f.degree(), 0);
    Analysis an(f);
    return type_of(f, an, d);
}

bool type_less(const TypeMatrix& a, const TypeMatrix& b) {
    if (a.w.size() != b.w.size() || (!a.w.empty() && a.w[0].size() != b.w[0].size()))
        throw DomainError("type_less", "types of different shape");
    return a.w < b.w;
}

NiceReport is_nice(const TupleFamily& f, bool check_membership) {
    f.validate();
    return nice_of(f, Analysis(f), check_membership);
}

namespace {

TupleFamily vdc_impl(const TupleFamily& f, const Tuple& anchor, const ShiftPoly& h, Analysis* an) {
    if (anchor.size() != f.ell) throw DomainError("vdc_operation", "anchor has the wrong length");
    TupleFamily out;
    out.ell = f.ell;
    out.bases = f.bases;
    out.next_symbol = f.next_symbol;
    for (auto s : h.symbols()) out.next_symbol = std::max(out.next_symbol, s + 1);
    Analysis local;
    if (!an) an = &local;
    an->e.clear();
    an->heads.clear();
    // S_h part first, then the unshifted part; * drops tuples of bounded functions
    for (int pass = 0; pass < 2; ++pass) {
        for (auto& t : f.tuples) {
            Tuple u(f.ell);
            std::vector<EntryInfo> inf(f.ell);
            bool bounded = true;
            for (std::size_t i = 0; i < f.ell; ++i) {
                u[i] = (pass == 0 ? t[i].shifted(h) : t[i]) - anchor[i];
                inf[i] = info_of(u[i]);
                bounded = bounded && inf[i].bounded;
            }
            if (bounded) continue;
            out.tuples.push_back(std::move(u));
            an->e.push_back(std::move(inf));
        }
    }
    return out;
}

}  // namespace

TupleFamily vdc_operation(const TupleFamily& f, const Tuple& anchor, const ShiftPoly& h) {
    return vdc_impl(f, anchor, h, nullptr);
}

Anchor choose_reduction_tuple(const TupleFamily& f, bool check_nice) {
    f.validate();
    if (f.tuples.empty()) throw DomainError("choose_reduction_tuple", "empty family");
    if (f.bases.empty()) throw DomainError("choose_reduction_tuple", "type-only family: no bases declared");
    Analysis an(f);
    if (check_nice) {
        auto r = nice_of(f, an, true);
        if (!r.nice) throw NotNice("choose_reduction_tuple", r.violations.front());
    }
    return choose(f, an);
}

bool ReductionTrace::sound() const {
    return std::all_of(steps.begin(), steps.end(), [](const ReductionStep& s) { return s.decreased && s.nice_after.nice; });
}

std::vector<long> excluded_shifts(const TupleFamily& f, std::uint32_t symbol, int d, long lo, long hi) {
    std::vector<long> out;
    Analysis an(f);
    TypeMatrix formal = type_of(f, an, d);  // NOLINT
    for (long v = lo; v <= hi; ++v) {
        TupleFamily g = f;
        bool bad = false;
        for (auto& t : g.tuples) {
            for (auto& x : t) x = hardy::substitute(x, symbol, mpq_class(v));
            bad = bad || all_bounded(t);
        }
        if (!bad && !g.tuples.empty()) {
            Analysis ag(g);
            bad = !nice_of(g, ag, false).nice || !(type_of(g, ag, d) == formal);
        }
        if (bad) out.push_back(v);
    }
    return out;
}

ReductionTrace reduce_fully(const TupleFamily& f, const ReduceOptions& opt) {
    f.validate();
    ReductionTrace tr;
    tr.d = std::max(f.degree(), 0);
    tr.terminal = f;
    if (f.tuples.empty() || f.degree() <= 0) return tr;
    if (f.bases.empty()) throw DomainError("reduce_fully", "type-only family: no bases declared");
    TupleFamily cur = f;
    Analysis an(cur);
    {
        auto r = nice_of(cur, an, true);
        if (!r.nice) throw NotNice("reduce_fully", r.violations.front());
    }
    TypeMatrix w = type_of(cur, an, tr.d);
    while (!cur.tuples.empty() && an.e[0][0].deg >= 1) {
        if (static_cast<int>(tr.steps.size()) >= opt.max_steps) {
            tr.terminal = cur;
            throw MaxStepsExceeded("no termination after " + std::to_string(opt.max_steps) + " steps; stuck at " +
                                       w.str() + " " + cur.str(),
                                   std::move(tr));
        }
        ReductionStep st;
        st.before = cur;
        st.type_before = w;
        st.anchor = choose(cur, an);
        st.symbol = cur.next_symbol;
        Analysis an2;
        TupleFamily nx = vdc_impl(cur, st.anchor.coords, ShiftPoly::symbol(st.symbol), &an2);
        nx.next_symbol = st.symbol + 1;
        if (nx.tuples.size() > opt.max_tuples) {
            tr.terminal = cur;
            throw TupleBudgetExceeded("step " + std::to_string(tr.steps.size() + 1) + " produces " +
                                          std::to_string(nx.tuples.size()) + " tuples (budget " +
                                          std::to_string(opt.max_tuples) + ")",
                                      std::move(tr));
        }
        st.type_after = type_of(nx, an2, tr.d);
        st.decreased = type_less(st.type_after, w);
        if (nx.tuples.empty()) {
            st.nice_after = {};
        } else {
            st.nice_after = nice_of(nx, an2, true);
        }
        if (opt.excluded_h && !nx.tuples.empty()) st.excluded_h = excluded_shifts(nx, st.symbol, tr.d);
        st.after = nx;
        bool stop = !st.decreased || !st.nice_after.nice;
        tr.steps.push_back(std::move(st));
        cur = std::move(nx);
        an = std::move(an2);
        w = tr.steps.back().type_after;
        // a non-nice or non-decreasing step is recorded and ends the trace; sound() reports it
        if (stop) break;
    }
    tr.terminal = cur;
    return tr;
}

}  // namespace ergolab::reduction
