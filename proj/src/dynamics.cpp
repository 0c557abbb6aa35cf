#include "ergolab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "ergolab/errors.hpp"

namespace ergolab::dyn {

namespace {

const double kTau = 6.283185307179586476925286766559;

bool same_angle(const Angle& a, const Angle& b) {
    return a.rational_part() == b.rational_part() && a.surds() == b.surds();
}

long mod(__int128 a, long m) {
    __int128 r = a % m;
    return static_cast<long>(r < 0 ? r + m : r);
}

}  // namespace

size_t TransformSpec::dim() const {
    if (auto* r = std::get_if<TorusRotation>(&kind)) return r->angles.size();
    if (is_cyclic()) return 1;
    return 2;
}

bool TransformSpec::ergodic() const {
    if (auto* r = std::get_if<TorusRotation>(&kind)) return rationally_independent(r->angles);
    if (auto* c = std::get_if<CyclicRotation>(&kind)) return std::gcd(c->step, c->modulus) == 1;
    return !std::get<SkewProduct>(kind).alpha.is_rational();
}

std::string TransformSpec::str() const {
    std::ostringstream os;
    if (auto* r = std::get_if<TorusRotation>(&kind)) {
        os << "rotation(";
        for (size_t i = 0; i < r->angles.size(); ++i) os << (i ? ", " : "") << r->angles[i].text();
        os << ")";
    } else if (auto* c = std::get_if<CyclicRotation>(&kind)) {
        os << "cyclic(m=" << c->modulus << ", step=" << c->step << ")";
    } else {
        auto& s = std::get<SkewProduct>(kind);
        os << "skew(" << s.alpha.text() << ", " << s.beta.text() << ")";
    }
    return os.str();
}

Point iterate_power(const TransformSpec& T, long long p, const Point& x) {
    if (x.size() != T.dim()) throw DomainError("iterate_power", "point dimension mismatch");
    Point y(x.size());
    iterate_power_into(T, p, x, y);
    return y;
}

void iterate_power_into(const TransformSpec& T, long long p, const Point& x, Point& y) {
    if (auto* r = std::get_if<TorusRotation>(&T.kind)) {
        for (size_t i = 0; i < y.size(); ++i) y[i] = x[i] + mul(r->angles[i].fix(), p);
        return;
    }
    y = x;
    if (auto* c = std::get_if<CyclicRotation>(&T.kind)) {
        y[0] = static_cast<Fix>(mod(static_cast<__int128>(static_cast<long>(x[0])) + static_cast<__int128>(p) * c->step,
                                    c->modulus));
    } else {
        auto& s = std::get<SkewProduct>(T.kind);
        __int128 tri = static_cast<__int128>(p) * (static_cast<__int128>(p) - 1) / 2;
        y[0] = x[0] + mul(s.alpha.fix(), p);
        y[1] = x[1] + mul(x[0], p) + mul(s.alpha.fix(), tri) + mul(s.beta.fix(), p);
    }
}

Point iterate_power(const TransformSpec& T, const mpz_class& p, const Point& x) {
    if (!mpz_fits_slong_p(p.get_mpz_t()) || sizeof(long) < 8 || mpz_sizeinbase(p.get_mpz_t(), 2) > 63)
        throw Overflow("iterate_power", "power " + p.get_str() + " exceeds 63 bits");
    return iterate_power(T, static_cast<long long>(p.get_si()), x);
}

void step(const TransformSpec& T, Point& x) {
    if (auto* r = std::get_if<TorusRotation>(&T.kind)) {
        for (size_t i = 0; i < x.size(); ++i) x[i] += r->angles[i].fix();
    } else if (auto* c = std::get_if<CyclicRotation>(&T.kind)) {
        x[0] = static_cast<Fix>(mod(static_cast<long>(x[0]) + c->step, c->modulus));
    } else {
        auto& s = std::get<SkewProduct>(T.kind);
        x[1] += x[0] + s.beta.fix();
        x[0] += s.alpha.fix();
    }
}

size_t System::dim() const {
    if (transforms.empty()) throw DomainError("System", "no transforms");
    return transforms[0].dim();
}

bool System::cyclic() const { return !transforms.empty() && transforms[0].is_cyclic(); }

long System::modulus() const {
    if (!cyclic()) return 0;
    return std::get<CyclicRotation>(transforms[0].kind).modulus;
}

void System::validate() const {
    if (transforms.empty()) throw DomainError("System", "no transforms");
    bool cyc = transforms[0].is_cyclic();
    for (auto& T : transforms) {
        if (T.is_cyclic() != cyc || T.dim() != dim()) throw DomainError("System", "transforms act on different spaces");
        if (auto* c = std::get_if<CyclicRotation>(&T.kind)) {
            if (c->modulus < 1) throw DomainError("System", "cyclic modulus must be positive");
            if (c->modulus != modulus()) throw DomainError("System", "cyclic moduli differ");
        }
    }
    // skew products commute with each other only when alpha agrees, and not with rotations
    for (size_t i = 0; i < transforms.size(); ++i)
        for (size_t j = i + 1; j < transforms.size(); ++j) {
            auto* a = std::get_if<SkewProduct>(&transforms[i].kind);
            auto* b = std::get_if<SkewProduct>(&transforms[j].kind);
            if ((a == nullptr) != (b == nullptr))
                throw DomainError("System", "skew product alongside a rotation is not supported");
            if (a && !same_angle(a->alpha, b->alpha))
                throw DomainError("System", "skew products with different alpha do not commute");
        }
    // exact check on a few points
    SampleSpec probe{SampleSpec::Kind::Uniform, 4, 99};
    System tmp{transforms, probe};
    for (auto& x : sample_points(tmp))
        for (size_t i = 0; i < transforms.size(); ++i)
            for (size_t j = i + 1; j < transforms.size(); ++j) {
                auto u = iterate_power(transforms[i], 12345, iterate_power(transforms[j], -777, x));
                auto v = iterate_power(transforms[j], -777, iterate_power(transforms[i], 12345, x));
                if (u != v) throw DomainError("System", "transforms do not commute");
            }
}

std::vector<Point> sample_points(const System& sys) {
    size_t d = sys.dim();
    std::vector<Point> pts;
    if (sys.cyclic()) {
        long m = sys.modulus();
        if (sys.samples.kind == SampleSpec::Kind::AllResidues) {
            for (long r = 0; r < m; ++r) pts.push_back({static_cast<Fix>(r)});
            return pts;
        }
        std::mt19937_64 rng(sys.samples.seed);
        std::uniform_int_distribution<long> u(0, m - 1);
        for (size_t i = 0; i < sys.samples.count; ++i) pts.push_back({static_cast<Fix>(u(rng))});
        return pts;
    }
    if (sys.samples.kind == SampleSpec::Kind::LowDiscrepancy) {
        // additive recurrence with powers of the inverse generalized golden ratio
        double phi = 2;
        for (int it = 0; it < 64; ++it) phi = std::pow(1 + phi, 1.0 / (d + 1));
        Point step_v(d), start(d, static_cast<Fix>(1) << 127);
        for (size_t j = 0; j < d; ++j) step_v[j] = fix_from_double(std::pow(1 / phi, j + 1));
        std::mt19937_64 rng(sys.samples.seed);
        for (size_t j = 0; j < d; ++j) start[j] += static_cast<Fix>(rng()) << 64;
        for (size_t i = 0; i < sys.samples.count; ++i) {
            Point p(d);
            for (size_t j = 0; j < d; ++j) p[j] = start[j] + mul(step_v[j], static_cast<long long>(i));
            pts.push_back(p);
        }
        return pts;
    }
    std::mt19937_64 rng(sys.samples.seed);
    for (size_t i = 0; i < sys.samples.count; ++i) {
        Point p(d);
        for (auto& c : p) {
            Fix hi = rng();
            c = (hi << 64) | static_cast<Fix>(rng());
        }
        pts.push_back(p);
    }
    return pts;
}

Observable Observable::fourier(std::vector<std::pair<std::vector<long>, cplx>> terms) {
    Observable o;
    o.kind = FourierSeries{std::move(terms)};
    return o;
}

Observable Observable::box(std::vector<std::pair<double, double>> intervals) {
    for (auto& [lo, hi] : intervals)
        if (!(0 <= lo && lo <= hi && hi <= 1)) throw DomainError("Observable", "box interval outside [0,1)");
    Observable o;
    o.kind = BoxIndicator{std::move(intervals)};
    return o;
}

Observable Observable::table(std::vector<cplx> values) {
    if (values.empty()) throw DomainError("Observable", "empty table");
    Observable o;
    o.kind = Table{std::move(values)};
    return o;
}

Observable Observable::cyclic_character(long m, long k) {
    std::vector<cplx> v(m);
    for (long r = 0; r < m; ++r) v[r] = std::polar(1.0, kTau * static_cast<double>(mod(static_cast<__int128>(k) * r, m)) / m);
    return table(std::move(v));
}

cplx Observable::eval(const Point& x, long modulus) const {
    if (auto* f = std::get_if<FourierSeries>(&kind)) {
        cplx s = 0;
        if (modulus > 0) {
            long r = static_cast<long>(x[0]);
            for (auto& [k, c] : f->terms)
                s += c * std::polar(1.0, kTau * static_cast<double>(mod(static_cast<__int128>(k[0]) * r, modulus)) / modulus);
            return s;
        }
        for (auto& [k, c] : f->terms) {
            Fix ph = 0;
            for (size_t i = 0; i < k.size(); ++i) ph += mul(x[i], k[i]);
            s += c * e(ph);
        }
        return s;
    }
    if (auto* b = std::get_if<BoxIndicator>(&kind)) {
        for (size_t i = 0; i < b->intervals.size(); ++i) {
            double u = modulus > 0 ? static_cast<double>(static_cast<long>(x[i])) / modulus : to_double(x[i]);
            if (u < b->intervals[i].first || u >= b->intervals[i].second) return 0;
        }
        return 1;
    }
    return std::get<Table>(kind).values[static_cast<size_t>(x[0])];
}

double Observable::bound() const {
    double b = 0;
    if (auto* f = std::get_if<FourierSeries>(&kind)) {
        for (auto& [k, c] : f->terms) b += std::abs(c);
    } else if (std::holds_alternative<BoxIndicator>(kind)) {
        b = 1;
    } else {
        for (auto& v : std::get<Table>(kind).values) b = std::max(b, std::abs(v));
    }
    return b;
}

cplx Observable::integral(size_t dim, long modulus) const {
    if (modulus > 0) {
        cplx s = 0;
        for (long r = 0; r < modulus; ++r) s += eval({static_cast<Fix>(r)}, modulus);
        return s / static_cast<double>(modulus);
    }
    if (auto* f = std::get_if<FourierSeries>(&kind)) {
        cplx s = 0;
        for (auto& [k, c] : f->terms)
            if (std::all_of(k.begin(), k.end(), [](long v) { return v == 0; })) s += c;
        return s;
    }
    if (auto* b = std::get_if<BoxIndicator>(&kind)) {
        double v = 1;
        for (size_t i = 0; i < dim; ++i) v *= b->intervals[i].second - b->intervals[i].first;
        return v;
    }
    throw DomainError("Observable", "table observable on a torus");
}

void Observable::validate(size_t dim, long modulus) const {
    if (auto* f = std::get_if<FourierSeries>(&kind)) {
        for (auto& [k, c] : f->terms)
            if (k.size() != dim) throw DomainError("Observable", "frequency dimension mismatch");
    } else if (auto* b = std::get_if<BoxIndicator>(&kind)) {
        if (b->intervals.size() != dim) throw DomainError("Observable", "box dimension mismatch");
    } else {
        if (modulus <= 0) throw DomainError("Observable", "table observable needs a cyclic space");
        if (static_cast<long>(std::get<Table>(kind).values.size()) != modulus)
            throw DomainError("Observable", "table size differs from the modulus");
    }
}

std::string Observable::str() const {
    std::ostringstream os;
    if (auto* f = std::get_if<FourierSeries>(&kind)) {
        os << "fourier{";
        bool first = true;
        for (auto& [k, c] : f->terms) {
            os << (first ? "" : ", ") << "(";
            for (size_t i = 0; i < k.size(); ++i) os << (i ? "," : "") << k[i];
            os << "):" << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << "i";
            first = false;
        }
        os << "}";
    } else if (auto* b = std::get_if<BoxIndicator>(&kind)) {
        os << "box";
        for (auto& [lo, hi] : b->intervals) os << "[" << lo << "," << hi << ")";
    } else {
        os << "table[" << std::get<Table>(kind).values.size() << "]";
    }
    return os.str();
}

double CondExpEstimate::max_error() const {
    if (!oracle) return 0;
    double m = 0;
    for (size_t i = 0; i < birkhoff.size(); ++i) m = std::max(m, std::abs(birkhoff[i] - (*oracle)[i]));
    return m;
}

std::vector<cplx> orbit_values(const TransformSpec& T, const Observable& f, const Point& x, size_t len, long modulus) {
    std::vector<cplx> g(len);
    Point y = x;
    for (size_t j = 0; j < len; ++j) {
        g[j] = f.eval(y, modulus);
        step(T, y);
    }
    return g;
}

CondExpEstimate conditional_expectation(const System& sys, size_t t, const Observable& f, long N) {
    sys.validate();
    if (t >= sys.transforms.size()) throw DomainError("conditional_expectation", "transform index out of range");
    if (N < 1) throw DomainError("conditional_expectation", "N must be positive");
    const auto& T = sys.transforms[t];
    long m = sys.modulus();
    f.validate(sys.dim(), m);
    CondExpEstimate out;
    out.N = N;
    out.points = sample_points(sys);
    out.birkhoff.resize(out.points.size());
#pragma omp parallel for schedule(static)
    for (size_t i = 0; i < out.points.size(); ++i) {
        Point y = out.points[i];
        cplx s = 0;
        for (long n = 1; n <= N; ++n) {
            step(T, y);
            s += f.eval(y, m);
        }
        out.birkhoff[i] = s / static_cast<double>(N);
    }

    out.oracle = conditional_oracle(sys, t, f, out.points);
    out.estimate_only = !out.oracle;
    return out;
}

std::optional<std::vector<cplx>> conditional_oracle(const System& sys, size_t t, const Observable& f,
                                                    const std::vector<Point>& pts) {
    const auto& T = sys.transforms.at(t);
    long m = sys.modulus();
    std::vector<cplx> orc;
    if (auto* c = std::get_if<CyclicRotation>(&T.kind)) {
        long g = std::gcd(c->step, c->modulus);
        if (g == 0) g = c->modulus;
        for (auto& x : pts) {
            cplx s = 0;
            long r = static_cast<long>(x[0]);
            for (long j = 0; j < c->modulus / g; ++j) s += f.eval({static_cast<Fix>(mod(r + j * g, c->modulus))}, m);
            orc.push_back(s / static_cast<double>(c->modulus / g));
        }
    } else if (auto* r = std::get_if<TorusRotation>(&T.kind); r && std::holds_alternative<FourierSeries>(f.kind)) {
        // keep the frequencies fixed by the rotation
        std::vector<std::pair<std::vector<long>, cplx>> kept;
        for (auto& term : std::get<FourierSeries>(f.kind).terms)
            if (integer_combination(r->angles, term.first)) kept.push_back(term);
        auto inv = Observable::fourier(kept);
        for (auto& x : pts) orc.push_back(inv.eval(x));
    } else if (T.ergodic()) {
        orc.assign(pts.size(), f.integral(sys.dim(), m));
    } else {
        return std::nullopt;
    }
    return orc;
}

VdcReport vdc_inequality_check(const std::vector<std::vector<cplx>>& v, long H) {
    long N = static_cast<long>(v.size());
    if (N < 1 || H < 1 || H > N) throw DomainError("vdc_inequality_check", "need 1 <= H <= N");
    size_t D = v[0].size();
    for (auto& x : v) {
        if (x.size() != D) throw DomainError("vdc_inequality_check", "vectors of different length");
        double n2 = 0;
        for (auto& c : x) n2 += std::norm(c);
        if (n2 > 1 + 1e-12) throw DomainError("vdc_inequality_check", "vectors must have norm at most 1");
    }
    std::vector<cplx> sum(D);
    for (auto& x : v)
        for (size_t i = 0; i < D; ++i) sum[i] += x[i];
    VdcReport r;
    for (auto& c : sum) r.lhs += std::norm(c / static_cast<double>(N));
    double acc = 0;
    for (long h = 1; h <= H; ++h) {
        double re = 0;
        for (long n = 0; n + h < N; ++n)
            for (size_t i = 0; i < D; ++i) re += (v[n + h][i] * std::conj(v[n][i])).real();
        acc += (1 - static_cast<double>(h) / H) * re / N;
    }
    r.rhs = 2.0 / H * acc + 2.0 / H + 4.0 * H / N;
    r.holds = r.lhs <= r.rhs + 1e-9;
    if (!r.holds) {
        std::ostringstream os;
        os << "lhs " << r.lhs << " exceeds rhs " << r.rhs << " (N=" << N << ", H=" << H << ")";
        r.violation = os.str();
    }
    return r;
}

}  // namespace ergolab::dyn
