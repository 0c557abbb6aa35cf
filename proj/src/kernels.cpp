#include "ergolab/kernels.hpp"

#include <exception>
#include <mutex>

#include "ergolab/errors.hpp"

namespace ergolab::kern {

namespace {

std::size_t chunks(std::size_t begin, std::size_t end) { return end <= begin ? 0 : (end - begin + kChunk - 1) / kChunk; }

// rethrow the first exception (lowest chunk) raised inside a parallel region
class FirstError {
public:
    void record(std::size_t chunk) {
        std::lock_guard<std::mutex> g(mu_);
        if (!err_ || chunk < chunk_) {
            err_ = std::current_exception();
            chunk_ = chunk;
        }
    }
    void rethrow() {
        if (err_) std::rethrow_exception(err_);
    }

private:
    std::mutex mu_;
    std::exception_ptr err_;
    std::size_t chunk_ = 0;
};

cplx term_product(const std::vector<MultiTerm>& terms, const dyn::Point& x, std::size_t i, long modulus,
                  dyn::Point& buf) {
    cplx p = 1;
    for (auto& t : terms) {
        dyn::iterate_power_into(*t.T, (*t.powers)[i], x, buf);
        p *= t.f->eval(buf, modulus);
    }
    return p;
}

}  // namespace

std::vector<std::int64_t> floor_values(const hardy::FloorEvaluator& a, std::uint64_t lo, std::uint64_t hi,
                                       Escalations* esc) {
    if (hi < lo) return {};
    std::size_t n = hi - lo + 1;
    std::vector<std::int64_t> out(n);
    FirstError err;
    long nc = static_cast<long>(chunks(0, n));
    std::vector<Escalations> part(esc ? nc : 0);
#pragma omp parallel for schedule(dynamic, 1)
    for (long c = 0; c < nc; ++c) {
        try {
            std::size_t e = std::min(n, (c + 1) * kChunk);
            hardy::FloorInfo info;
            for (std::size_t i = c * kChunk; i < e; ++i) {
                out[i] = a.small(lo + i, &info);
                if (esc && info.bits_used > hardy::FloorOptions{}.start_bits) part[c].emplace_back(lo + i, info.bits_used);
            }
        } catch (...) {
            err.record(c);
        }
    }
    err.rethrow();
    if (esc)
        for (auto& p : part) esc->insert(esc->end(), p.begin(), p.end());
    return out;
}

std::vector<std::int64_t> floor_values_serial(const hardy::FloorEvaluator& a, std::uint64_t lo, std::uint64_t hi) {
    std::vector<std::int64_t> out;
    for (std::uint64_t n = lo; n <= hi && hi >= lo; ++n) out.push_back(a.small(n));
    return out;
}

cplx weyl_sum(const std::vector<std::int64_t>& seq, std::size_t begin, std::size_t end, dyn::Fix alpha, long k) {
    long nc = static_cast<long>(chunks(begin, end));
    std::vector<cplx> part(nc);
    dyn::Fix ka = dyn::mul(alpha, k);
#pragma omp parallel for schedule(static)
    for (long c = 0; c < nc; ++c) {
        std::size_t b = begin + c * kChunk, e = std::min(end, b + kChunk);
        cplx s = 0;
        for (std::size_t i = b; i < e; ++i) s += dyn::e(dyn::mul(ka, seq[i]));
        part[c] = s;
    }
    cplx s = 0;
    for (auto& p : part) s += p;
    return s;
}

cplx weyl_sum_serial(const std::vector<std::int64_t>& seq, std::size_t begin, std::size_t end, dyn::Fix alpha, long k) {
    cplx s = 0;
    for (std::size_t i = begin; i < end; ++i) s += dyn::e(dyn::mul(dyn::mul(alpha, k), seq[i]));
    return s;
}

std::vector<cplx> multi_sum(const std::vector<MultiTerm>& terms, const std::vector<dyn::Point>& pts, std::size_t begin,
                            std::size_t end, long modulus, const dyn::Observable* f0) {
    long nc = static_cast<long>(chunks(begin, end));
    std::size_t S = pts.size();
    std::vector<cplx> part(static_cast<std::size_t>(nc) * S);
    std::vector<cplx> w(S, 1);
    if (f0)
        for (std::size_t s = 0; s < S; ++s) w[s] = f0->eval(pts[s], modulus);
#pragma omp parallel
    {
        dyn::Point buf;
#pragma omp for schedule(static)
        for (long c = 0; c < nc; ++c) {
            std::size_t b = begin + c * kChunk, e = std::min(end, b + kChunk);
            for (std::size_t s = 0; s < S; ++s) {
                if (w[s] == cplx(0)) continue;
                buf.resize(pts[s].size());
                cplx acc = 0;
                for (std::size_t i = b; i < e; ++i) acc += term_product(terms, pts[s], i, modulus, buf);
                part[c * S + s] = acc;
            }
        }
    }
    std::vector<cplx> out(S);
    for (long c = 0; c < nc; ++c)
        for (std::size_t s = 0; s < S; ++s) out[s] += part[c * S + s];
    for (std::size_t s = 0; s < S; ++s) out[s] *= w[s];
    return out;
}

std::vector<cplx> multi_sum_serial(const std::vector<MultiTerm>& terms, const std::vector<dyn::Point>& pts,
                                   std::size_t begin, std::size_t end, long modulus, const dyn::Observable* f0) {
    std::vector<cplx> out;
    for (auto& x : pts) {
        dyn::Point buf(x.size());
        cplx w = f0 ? f0->eval(x, modulus) : cplx(1), acc = 0;
        if (w != cplx(0))
            for (std::size_t i = begin; i < end; ++i) acc += term_product(terms, x, i, modulus, buf);
        out.push_back(acc * w);
    }
    return out;
}

std::vector<cplx> term_values(const std::vector<MultiTerm>& terms, const dyn::Point& x, std::size_t begin,
                              std::size_t end, long modulus) {
    std::vector<cplx> out(end > begin ? end - begin : 0);
    long nc = static_cast<long>(chunks(begin, end));
#pragma omp parallel
    {
        dyn::Point buf(x.size());
#pragma omp for schedule(static)
        for (long c = 0; c < nc; ++c) {
            std::size_t b = begin + c * kChunk, e = std::min(end, b + kChunk);
            for (std::size_t i = b; i < e; ++i) out[i - begin] = term_product(terms, x, i, modulus, buf);
        }
    }
    return out;
}

}  // namespace ergolab::kern
