#include <fftw3.h>

#include <cmath>
#include <map>

#include "ergolab/dynamics.hpp"
#include "ergolab/errors.hpp"

namespace ergolab::dyn {

namespace {

size_t pow2_at_least(size_t n) {
    size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// r[n] = sum_{m<len_a} conj(a[m]) b[m+n] for 0 <= n < out_len, via one FFT pair
class Correlator {
public:
    explicit Correlator(size_t L) : L_(L) {
        a_ = fftw_alloc_complex(L);
        b_ = fftw_alloc_complex(L);
        // planning is not thread safe
#pragma omp critical(ergolab_fftw_plan)
        {
            fa_ = fftw_plan_dft_1d(static_cast<int>(L), a_, a_, FFTW_FORWARD, FFTW_ESTIMATE);
            fb_ = fftw_plan_dft_1d(static_cast<int>(L), b_, b_, FFTW_FORWARD, FFTW_ESTIMATE);
            inv_ = fftw_plan_dft_1d(static_cast<int>(L), b_, b_, FFTW_BACKWARD, FFTW_ESTIMATE);
        }
    }
    Correlator(const Correlator&) = delete;
    Correlator& operator=(const Correlator&) = delete;
    ~Correlator() {
#pragma omp critical(ergolab_fftw_plan)
        {
            fftw_destroy_plan(fa_);
            fftw_destroy_plan(fb_);
            fftw_destroy_plan(inv_);
        }
        fftw_free(a_);
        fftw_free(b_);
    }

    void run(const cplx* a, size_t la, const cplx* b, size_t lb, std::vector<cplx>& out, size_t out_len) {
        if (la + out_len > L_ + 1 || lb > L_) throw DomainError("Correlator", "transform too short");
        for (size_t i = 0; i < L_; ++i) {
            a_[i][0] = i < la ? a[i].real() : 0;
            a_[i][1] = i < la ? a[i].imag() : 0;
            b_[i][0] = i < lb ? b[i].real() : 0;
            b_[i][1] = i < lb ? b[i].imag() : 0;
        }
        fftw_execute(fa_);
        fftw_execute(fb_);
        for (size_t i = 0; i < L_; ++i) {
            cplx p = std::conj(cplx(a_[i][0], a_[i][1])) * cplx(b_[i][0], b_[i][1]);
            b_[i][0] = p.real();
            b_[i][1] = p.imag();
        }
        fftw_execute(inv_);
        out.resize(out_len);
        for (size_t n = 0; n < out_len; ++n) out[n] = cplx(b_[n][0], b_[n][1]) / static_cast<double>(L_);
    }

private:
    size_t L_;
    fftw_complex *a_, *b_;
    fftw_plan fa_, fb_, inv_;
};

// (1/N) sum_{n=1}^N |(1/N) sum_{m=1}^N conj(g(m)) g(m+n)|^2, g indexed from 0 with g[0] unused
double mean_square_correlation(const cplx* g, long N, Correlator& cor, std::vector<cplx>& buf) {
    // a = g[1..N], b = g[1..2N]; r[n] covers m+n
    cor.run(g + 1, N, g + 1, 2 * N, buf, N + 1);
    double s = 0;
    for (long n = 1; n <= N; ++n) s += std::norm(buf[n] / static_cast<double>(N));
    return s / N;
}

}  // namespace

SeminormEstimate ghk_seminorm(const System& sys, size_t t, const Observable& f, int k, const std::vector<long>& schedule,
                              const SeminormOptions& opt) {
    sys.validate();
    if (k < 1 || k > 3) throw DomainError("ghk_seminorm", "k must be 1, 2 or 3");
    if (t >= sys.transforms.size()) throw DomainError("ghk_seminorm", "transform index out of range");
    long mod = sys.modulus();
    f.validate(sys.dim(), mod);
    const auto& T = sys.transforms[t];
    auto pts = sample_points(sys);
    SeminormEstimate out;
    out.k = k;
    out.schedule = schedule;
    out.samples = pts.size();
    out.seed = sys.samples.seed;
    for (long N : schedule) {
        if (N < 1) throw DomainError("ghk_seminorm", "schedule entries must be positive");
        double loops = static_cast<double>(pts.size()) * std::pow(static_cast<double>(N), k);
        if (loops > opt.loop_cap)
            throw BudgetExceeded("ghk_seminorm", "nested loop count " + std::to_string(loops) + " exceeds cap");
    }
    if (auto* fs = std::get_if<FourierSeries>(&f.kind); fs && !T.is_cyclic() && T.ergodic() &&
                                                        std::holds_alternative<TorusRotation>(T.kind))
        out.oracle = kronecker_seminorm(*fs, k);

    for (long N : schedule) {
        std::vector<double> per(pts.size());
        size_t len = static_cast<size_t>(k * N + 1);
#pragma omp parallel for schedule(static)
        for (size_t i = 0; i < pts.size(); ++i) {
            auto g = orbit_values(T, f, pts[i], len, mod);
            if (k == 1) {
                cplx s = 0;
                for (long m = 1; m <= N; ++m) s += g[m];
                per[i] = std::norm(s / static_cast<double>(N));
                continue;
            }
            Correlator cor(pow2_at_least(2 * static_cast<size_t>(N)));
            std::vector<cplx> buf;
            if (k == 2) {
                per[i] = mean_square_correlation(g.data(), N, cor, buf);
                continue;
            }
            // k = 3: average the level-2 quantity of conj(f) . T^{n2} f along the orbit
            std::vector<cplx> G(2 * N + 1);
            double s = 0;
            for (long n2 = 1; n2 <= N; ++n2) {
                for (long j = 1; j <= 2 * N; ++j) G[j] = std::conj(g[j]) * g[j + n2];
                s += mean_square_correlation(G.data(), N, cor, buf);
            }
            per[i] = s / N;
        }
        double mean = 0;
        for (double v : per) mean += v;
        mean /= static_cast<double>(per.size());
        // per-sample values are |E(.|I)|^2-type quantities: the seminorm is the 2^k-th root of their mean
        out.values.push_back(std::pow(std::max(mean, 0.0), 1.0 / (k == 1 ? 2 : (k == 2 ? 4 : 8))));
    }
    return out;
}

double kronecker_seminorm(const FourierSeries& f, int k) {
    std::map<std::vector<long>, cplx> c;
    for (auto& [freq, v] : f.terms) c[freq] += v;
    auto coef = [&](const std::vector<long>& q) {
        auto it = c.find(q);
        return it == c.end() ? cplx(0) : it->second;
    };
    if (k == 1) {
        if (c.empty()) return 0;
        return std::abs(coef(std::vector<long>(c.begin()->first.size(), 0)));
    }
    if (k == 2) {
        double s = 0;
        for (auto& [q, v] : c) s += std::pow(std::abs(v), 4);
        return std::pow(s, 0.25);
    }
    if (k != 3) throw DomainError("kronecker_seminorm", "k must be at most 3");
    // average over n of sum_r |F_n^(r)|^4 with F_n = conj(f) T^n f; only l1+l3 = l2+l4 survives
    auto sub = [](const std::vector<long>& a, const std::vector<long>& b) {
        std::vector<long> d(a.size());
        for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
        return d;
    };
    std::vector<std::vector<long>> freqs;
    for (auto& [q, v] : c) freqs.push_back(q);
    std::map<std::vector<long>, int> rs;
    for (auto& a : freqs)
        for (auto& b : freqs) rs[sub(a, b)] = 1;
    cplx total = 0;
    for (auto& [r, one] : rs)
        for (auto& l1 : freqs)
            for (auto& l2 : freqs)
                for (auto& l3 : freqs) {
                    std::vector<long> l4(l1.size());
                    for (size_t i = 0; i < l4.size(); ++i) l4[i] = l1[i] + l3[i] - l2[i];
                    cplx v = std::conj(coef(sub(l1, r))) * coef(l1) * coef(sub(l2, r)) * std::conj(coef(l2)) *
                             std::conj(coef(sub(l3, r))) * coef(l3) * coef(sub(l4, r)) * std::conj(coef(l4));
                    total += v;
                }
    return std::pow(std::max(total.real(), 0.0), 0.125);
}

DualSequence dual_sequence(const TransformSpec& T, const Observable& f, int k, const Point& x, long M, long n0,
                           long count, long modulus) {
    if (k < 1 || k > 2) throw DomainError("dual_sequence", "k must be 1 or 2");
    if (M < 1 || count < 1 || n0 < 0) throw DomainError("dual_sequence", "need M >= 1, count >= 1, n0 >= 0");
    DualSequence d;
    d.k = k;
    d.M = M;
    d.n0 = n0;
    d.values.resize(count);
    // g[j] = f(T^j x)
    auto g = orbit_values(T, f, iterate_power(T, n0, x), static_cast<size_t>(count + k * M + 1), modulus);
    if (k == 1) {
        cplx s = 0;
        for (long m = 1; m <= M; ++m) s += std::conj(g[m]);
        for (long n = 0; n < count; ++n) {
            d.values[n] = s / static_cast<double>(M);
            s += std::conj(g[n + M + 1]) - std::conj(g[n + 1]);
        }
        return d;
    }
    const int chunk = 64;
    long nchunks = (count + chunk - 1) / chunk;
#pragma omp parallel
    {
        Correlator cor(pow2_at_least(2 * static_cast<size_t>(M) + 1));
        std::vector<cplx> buf;
#pragma omp for schedule(static)
        for (long ci = 0; ci < nchunks; ++ci)
            for (long n = ci * chunk; n < std::min(count, (ci + 1) * chunk); ++n) {
                // inner(m1) = sum_{m2} conj(g(n+m2)) g(n+m1+m2)
                const cplx* base = g.data() + n + 1;
                cor.run(base, M, base, 2 * M, buf, M + 1);
                cplx s = 0;
                for (long m1 = 1; m1 <= M; ++m1) s += std::conj(g[n + m1]) * buf[m1];
                d.values[n] = s / (static_cast<double>(M) * M);
            }
    }
    return d;
}

cplx dual_correlation(const TransformSpec& T, const Observable& f, const DualSequence& d, const Point& x, long modulus) {
    auto g = orbit_values(T, f, iterate_power(T, d.n0, x), d.values.size(), modulus);
    cplx s = 0;
    for (size_t n = 0; n < g.size(); ++n) s += g[n] * d.values[n];
    return s / static_cast<double>(g.size());
}

}  // namespace ergolab::dyn
