#include <benchmark/benchmark.h>
#include <omp.h>

#include "ergolab/kernels.hpp"

using namespace ergolab;
using namespace ergolab::dyn;

namespace {

// t^1.5 uses integer roots, t^1.5 + log t goes through MPFR
const char* kExprs[] = {"t^1.5", "t^1.5 + log(t)"};

void floor_parallel(benchmark::State& st) {
    hardy::FloorEvaluator a(hardy::HardyExpr::parse(kExprs[st.range(1)]));
    omp_set_num_threads(omp_get_num_procs());
    for (auto _ : st) benchmark::DoNotOptimize(kern::floor_values(a, 1, st.range(0)));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void floor_serial(benchmark::State& st) {
    hardy::FloorEvaluator a(hardy::HardyExpr::parse(kExprs[st.range(1)]));
    for (auto _ : st) benchmark::DoNotOptimize(kern::floor_values_serial(a, 1, st.range(0)));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

std::vector<std::int64_t> seq15(std::uint64_t n) {
    return kern::floor_values(hardy::FloorEvaluator(hardy::HardyExpr::parse("t^1.5")), 1, n);
}

void weyl_parallel(benchmark::State& st) {
    auto seq = seq15(st.range(0));
    Fix al = Angle::parse("sqrt(2)").fix();
    omp_set_num_threads(omp_get_num_procs());
    for (auto _ : st) benchmark::DoNotOptimize(kern::weyl_sum(seq, 0, seq.size(), al, 1));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void weyl_serial(benchmark::State& st) {
    auto seq = seq15(st.range(0));
    Fix al = Angle::parse("sqrt(2)").fix();
    for (auto _ : st) benchmark::DoNotOptimize(kern::weyl_sum_serial(seq, 0, seq.size(), al, 1));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

struct MultiSetup {
    TransformSpec T1 = TransformSpec::rotation({Angle::parse("sqrt(2)")});
    TransformSpec T2 = TransformSpec::rotation({Angle::parse("sqrt(3)")});
    Observable f = Observable::character({1});
    std::vector<std::int64_t> p1, p2;
    std::vector<kern::MultiTerm> terms;
    std::vector<Point> pts;
    explicit MultiSetup(std::uint64_t n) {
        p1 = seq15(n);
        p2 = kern::floor_values(hardy::FloorEvaluator(hardy::HardyExpr::parse("t^1.1")), 1, n);
        terms = {{&T1, &f, &p1}, {&T2, &f, &p2}};
        pts = sample_points(System{{T1, T2}, {SampleSpec::Kind::Uniform, 16, 1}});
    }
};

void multi_parallel(benchmark::State& st) {
    MultiSetup m(st.range(0));
    omp_set_num_threads(omp_get_num_procs());
    for (auto _ : st) benchmark::DoNotOptimize(kern::multi_sum(m.terms, m.pts, 0, m.p1.size(), 0));
    st.SetItemsProcessed(st.iterations() * st.range(0) * m.pts.size());
}

void multi_serial(benchmark::State& st) {
    MultiSetup m(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(kern::multi_sum_serial(m.terms, m.pts, 0, m.p1.size(), 0));
    st.SetItemsProcessed(st.iterations() * st.range(0) * m.pts.size());
}

}  // namespace

BENCHMARK(floor_serial)->Args({1 << 16, 0})->Args({1 << 14, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(floor_parallel)->Args({1 << 16, 0})->Args({1 << 14, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(weyl_serial)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(weyl_parallel)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(multi_serial)->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK(multi_parallel)->Arg(1 << 16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
