#include "ergolab/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ergolab/errors.hpp"
#include "ergolab/kernels.hpp"

namespace ergolab::pat {

namespace {

constexpr std::size_t kVChunk = 1 << 14;

bool regime(const std::vector<hardy::HardyExpr>& a) {
    for (auto& e : a)
        if (!hardy::in_class_G(e)) return false;
    return a.size() < 2 || hardy::different_growth(a);
}

std::vector<std::int64_t> floors(const hardy::HardyExpr& a, long lo, long hi) {
    if (lo < 1 || hi < lo) throw DomainError("patterns", "n range must satisfy 1 <= lo <= hi");
    return kern::floor_values(hardy::FloorEvaluator(a), static_cast<std::uint64_t>(lo), static_cast<std::uint64_t>(hi));
}

// row-major strides of the box
std::vector<std::int64_t> strides(int dim, long L) {
    std::vector<std::int64_t> s(static_cast<size_t>(dim));
    std::int64_t w = 1;
    for (int j = dim; j-- > 0;) {
        s[static_cast<size_t>(j)] = w;
        w *= 2 * L;
    }
    return s;
}

// shift = p * v; fits is false when some coordinate leaves the box width
struct Shift {
    Vec s;
    std::int64_t offset = 0;
    bool fits = true;
};

Shift make_shift(const Vec& v, std::int64_t p, long L, const std::vector<std::int64_t>& st) {
    Shift sh;
    for (size_t j = 0; j < v.size(); ++j) {
        __int128 c = static_cast<__int128>(p) * v[j];
        if (c >= 2 * L || c <= -2 * L) {
            sh.fits = false;
            c = 0;
        }
        sh.s.push_back(static_cast<long>(c));
        sh.offset += static_cast<std::int64_t>(c) * st[j];
    }
    return sh;
}

void check_vectors(const std::vector<Vec>& vecs, size_t l, int dim) {
    if (vecs.size() != l) throw DomainError("patterns", "need one vector per iterate");
    for (auto& v : vecs)
        if (v.size() != static_cast<size_t>(dim)) throw DomainError("patterns", "vector of wrong dimension");
}

}  // namespace

DenseSet::DenseSet(int dim, long L) : dim_(dim), L_(L) {
    if (dim < 1 || L < 1) throw DomainError("DenseSet", "need dim >= 1 and L >= 1");
    double vol = std::pow(2.0 * L, dim);
    if (vol > 4e8) throw BudgetExceeded("DenseSet", "box too large");
    bits_.assign(static_cast<size_t>(vol), 0);
}

DenseSet DenseSet::full(int dim, long L) {
    DenseSet e(dim, L);
    std::fill(e.bits_.begin(), e.bits_.end(), 1);
    return e;
}

DenseSet DenseSet::random(int dim, long L, double density, std::uint64_t seed) {
    if (!(density >= 0 && density <= 1)) throw DomainError("DenseSet::random", "density must lie in [0, 1]");
    DenseSet e(dim, L);
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution b(density);
    for (auto& x : e.bits_) x = b(rng);
    return e;
}

DenseSet DenseSet::from_points(int dim, long L, const std::vector<Vec>& pts) {
    DenseSet e(dim, L);
    for (auto& p : pts) e.insert(p);
    return e;
}

bool DenseSet::in_box(const Vec& v) const {
    if (v.size() != static_cast<size_t>(dim_)) throw DomainError("DenseSet", "point of wrong dimension");
    for (long c : v)
        if (c < -L_ || c >= L_) return false;
    return true;
}

bool DenseSet::contains(const Vec& v) const { return in_box(v) && bits_[index(v)]; }

void DenseSet::insert(const Vec& v) {
    if (!in_box(v)) throw DomainError("DenseSet", "point outside the box");
    bits_[index(v)] = 1;
}

std::size_t DenseSet::count() const { return static_cast<size_t>(std::count(bits_.begin(), bits_.end(), 1)); }

std::size_t DenseSet::index(const Vec& v) const {
    std::size_t i = 0;
    for (long c : v) i = i * static_cast<size_t>(2 * L_) + static_cast<size_t>(c + L_);
    return i;
}

Vec DenseSet::point(std::size_t i) const {
    Vec v(static_cast<size_t>(dim_));
    for (int j = dim_; j-- > 0; i /= static_cast<size_t>(2 * L_))
        v[static_cast<size_t>(j)] = static_cast<long>(i % static_cast<size_t>(2 * L_)) - L_;
    return v;
}

ConfigSearch find_multidim_config(const DenseSet& E, const std::vector<Vec>& vecs, const std::vector<hardy::HardyExpr>& a,
                                  long n_lo, long n_hi, std::size_t cap) {
    size_t l = a.size();
    check_vectors(vecs, l, E.dim());
    ConfigSearch out;
    out.regime_ok = regime(a);
    auto st = strides(E.dim(), E.L());
    long W = 2 * E.L();
    size_t nn = static_cast<size_t>(n_hi - n_lo + 1);
    std::vector<std::vector<Shift>> sh(nn);  // sh[n][i]
    for (size_t i = 0; i < l; ++i) {
        auto p = floors(a[i], n_lo, n_hi);
        for (size_t k = 0; k < nn; ++k) sh[k].push_back(make_shift(vecs[i], p[k], E.L(), st));
    }
    size_t vol = E.volume(), chunks = (vol + kVChunk - 1) / kVChunk;
    std::vector<std::vector<Witness>> found(chunks);
    std::vector<size_t> total(chunks), checked(chunks);
#pragma omp parallel for schedule(dynamic, 1)
    for (long ch = 0; ch < static_cast<long>(chunks); ++ch) {
        size_t c = static_cast<size_t>(ch);
        std::vector<long> coord(static_cast<size_t>(E.dim()));
        for (size_t idx = c * kVChunk; idx < std::min(vol, (c + 1) * kVChunk); ++idx) {
            size_t rest = idx;
            for (int j = E.dim(); j-- > 0; rest /= static_cast<size_t>(W))
                coord[static_cast<size_t>(j)] = static_cast<long>(rest % static_cast<size_t>(W));
            for (size_t k = 0; k < nn; ++k) {
                bool inside = true;
                for (size_t i = 0; i < l && inside; ++i) {
                    inside = sh[k][i].fits;
                    for (size_t j = 0; j < coord.size() && inside; ++j) {
                        long y = coord[j] + sh[k][i].s[j];
                        inside = y >= 0 && y < W;
                    }
                }
                if (!inside) continue;
                ++checked[c];
                if (!E.at(idx)) continue;
                bool hit = true;
                for (size_t i = 0; i < l && hit; ++i)
                    hit = E.at(static_cast<size_t>(static_cast<std::int64_t>(idx) + sh[k][i].offset));
                if (!hit) continue;
                ++total[c];
                if (found[c].size() < cap) found[c].push_back({E.point(idx), n_lo + static_cast<long>(k)});
            }
        }
    }
    for (size_t c = 0; c < chunks; ++c) {
        out.total += total[c];
        out.checked += checked[c];
        for (auto& w : found[c]) {
            if (out.witnesses.size() >= cap) break;
            out.witnesses.push_back(std::move(w));
        }
    }
    return out;
}

SyndeticSet SyndeticSet::make(long L, std::vector<long> members) {
    if (L < 1) throw DomainError("SyndeticSet", "L must be positive");
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    if (members.empty()) throw DomainError("SyndeticSet", "empty set");
    if (members.front() < 1 || members.back() > L) throw DomainError("SyndeticSet", "members must lie in [1, L]");
    SyndeticSet s;
    s.L = L;
    s.gap = members.front();
    for (size_t i = 1; i < members.size(); ++i) s.gap = std::max(s.gap, members[i] - members[i - 1]);
    s.gap = std::max(s.gap, L + 1 - members.back());
    s.mask.assign(static_cast<size_t>(L) + 1, 0);
    for (long x : members) s.mask[static_cast<size_t>(x)] = 1;
    s.members = std::move(members);
    return s;
}

SyndeticSet SyndeticSet::progression(long first, long step, long L) {
    if (step < 1 || first < 1) throw DomainError("SyndeticSet", "progression needs first >= 1 and step >= 1");
    std::vector<long> m;
    for (long x = first; x <= L; x += step) m.push_back(x);
    return make(L, std::move(m));
}

SystemWitness syndetic_system_solve(const std::vector<SyndeticSet>& E, long c, const std::vector<long>& ci,
                                    const std::vector<hardy::HardyExpr>& a, long n_lo, long n_hi) {
    size_t l = a.size();
    if (l == 0 || E.size() != l + 1 || ci.size() != l) throw DomainError("syndetic_system_solve", "need E_0..E_l and c_1..c_l");
    if (c < 1) throw DomainError("syndetic_system_solve", "c must be positive");
    for (long x : ci)
        if (x < 1) throw DomainError("syndetic_system_solve", "c_i must be positive");
    std::vector<std::vector<std::int64_t>> p;
    for (auto& e : a) p.push_back(floors(e, n_lo, n_hi));
    SystemWitness w;
    for (long n = n_lo; n <= n_hi; ++n) {
        size_t k = static_cast<size_t>(n - n_lo);
        for (long x0 : E[0].members) {
            ++w.checked;
            bool ok = true, beyond = false;
            std::vector<long> x{x0};
            for (size_t i = 0; i < l && ok; ++i) {
                __int128 num = static_cast<__int128>(p[i][k]) + static_cast<__int128>(c) * x0;
                if (num > static_cast<__int128>(ci[i]) * E[i + 1].L) {
                    beyond = true;
                    ok = false;
                } else if (num % ci[i] != 0) {
                    ok = false;
                } else {
                    long xi = static_cast<long>(num / ci[i]);
                    ok = E[i + 1].contains(xi);
                    x.push_back(xi);
                }
            }
            if (ok) {
                w.found = true;
                w.x = std::move(x);
                w.n = n;
                return w;
            }
            if (beyond) break;  // larger x_0 only push x_i further out
        }
    }
    w.note = "not found at scale L = " + std::to_string(E[0].L) + ", n in [" + std::to_string(n_lo) + ", " +
             std::to_string(n_hi) + "]";
    return w;
}

IntersectionReport intersection_average(const std::vector<DenseSet>& E, const std::vector<Vec>& vecs,
                                        const std::vector<hardy::HardyExpr>& a, long N, const std::vector<long>& k) {
    size_t l = a.size();
    if (l == 0 || E.size() != l + 1) throw DomainError("intersection_average", "need E_0..E_l");
    if (!k.empty() && k.size() != l) throw DomainError("intersection_average", "need one k_i per iterate");
    for (auto& e : E)
        if (e.dim() != E[0].dim() || e.L() != E[0].L()) throw DomainError("intersection_average", "sets on different boxes");
    check_vectors(vecs, l, E[0].dim());
    const int d = E[0].dim();
    const long W = 2 * E[0].L();
    auto st = strides(d, E[0].L());
    const size_t vol = E[0].volume();

    // share of v in E_0 with v + s_i in E_i among the v whose shifts all stay in the box
    auto count = [&](const std::vector<Shift>& sh, double& inside_share) {
        std::vector<long> lo(static_cast<size_t>(d), 0), hi(static_cast<size_t>(d), W);
        bool any = true;
        for (auto& s : sh) {
            any = any && s.fits;
            for (int j = 0; j < d; ++j) {
                lo[j] = std::max(lo[j], -s.s[j]);
                hi[j] = std::min(hi[j], W - s.s[j]);
            }
        }
        double inside = any ? 1.0 : 0.0;
        for (int j = 0; j < d; ++j) inside *= static_cast<double>(std::max(0L, hi[j] - lo[j]));
        inside_share = inside / static_cast<double>(vol);
        if (inside == 0) return 0.0;
        long long hits = 0;
#pragma omp parallel for schedule(static) reduction(+ : hits)
        for (long long idx = 0; idx < static_cast<long long>(vol); ++idx) {
            size_t rest = static_cast<size_t>(idx);
            bool in = true;
            for (int j = d; j-- > 0 && in; rest /= static_cast<size_t>(W)) {
                long cj = static_cast<long>(rest % static_cast<size_t>(W));
                in = cj >= lo[j] && cj < hi[j];
            }
            if (!in || !E[0].at(static_cast<size_t>(idx))) continue;
            bool hit = true;
            for (size_t i = 0; i < l && hit; ++i) hit = E[i + 1].at(static_cast<size_t>(idx + sh[i].offset));
            hits += hit;
        }
        return static_cast<double>(hits) / inside;
    };

    IntersectionReport r;
    r.N = N;
    std::vector<Shift> base;
    for (size_t i = 0; i < l; ++i) base.push_back(make_shift(vecs[i], k.empty() ? 0 : -k[i], E[0].L(), st));
    double ignore = 0;
    r.alpha = count(base, ignore);
    r.bound = std::pow(r.alpha, static_cast<double>(l + 1));
    r.vacuous = r.alpha == 0;
    r.sampling = 3 * std::sqrt(r.bound * (1 - r.bound) / static_cast<double>(vol));

    std::vector<std::vector<std::int64_t>> p;
    for (auto& e : a) p.push_back(floors(e, 1, N));
    for (long n = 0; n < N; ++n) {
        std::vector<Shift> sh;
        for (size_t i = 0; i < l; ++i) sh.push_back(make_shift(vecs[i], p[i][static_cast<size_t>(n)], E[0].L(), st));
        double inside = 0;
        r.value += count(sh, inside);
        r.boundary += 1 - inside;
    }
    r.value /= static_cast<double>(N);
    r.boundary /= static_cast<double>(N);
    r.holds = r.vacuous || r.value >= r.bound - r.boundary - r.sampling;
    return r;
}

}  // namespace ergolab::pat
