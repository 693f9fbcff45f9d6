#include <benchmark/benchmark.h>

#include "hmclab/analyze.hpp"
#include "hmclab/diagnose.hpp"
#include "hmclab/flow.hpp"
#include "hmclab/sample.hpp"

using namespace hmclab;

static void BM_exact_flow(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    auto spectrum = Spectrum::linspaced(d, 1.0, 100.0);
    std::vector<double> x(d, 0.3), v(d, -0.1);
    for (auto _ : state) {
        exact_flow_inplace(spectrum, x, v, 0.17);
        benchmark::DoNotOptimize(x.data());
    }
    state.SetItemsProcessed(state.iterations() * d);
}
BENCHMARK(BM_exact_flow)->Arg(10)->Arg(100)->Arg(1000);

static void BM_transition_block(benchmark::State& state) {
    double sig = 1.0;
    for (auto _ : state) {
        auto b = transition_block(sig, 0.4, 0.7);
        benchmark::DoNotOptimize(b);
        sig = sig < 100.0 ? sig + 0.1 : 1.0;
    }
}
BENCHMARK(BM_transition_block);

static void BM_damped_chain(benchmark::State& state) {
    auto t = Target::quadratic(Spectrum::linspaced(10, 1.0, 10.0));
    SamplerSpec spec;
    spec.variant = Variant::Damped;
    spec.T = 0.3;
    spec.eta = 0.5;
    spec.K = static_cast<int>(state.range(0));
    spec.seed = 1;
    for (auto _ : state) {
        auto rec = run_chain(t, spec);
        benchmark::DoNotOptimize(rec.positions.data());
    }
    state.SetItemsProcessed(state.iterations() * spec.K);
}
BENCHMARK(BM_damped_chain)->Arg(1000);

static void BM_spectral_grid(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(worst_case_rate(1.0, 100.0, 0.3, 0.6, 10000));
    }
}
BENCHMARK(BM_spectral_grid);

static void BM_ess(benchmark::State& state) {
    const int K = static_cast<int>(state.range(0));
    RngStream rng(3);
    std::vector<double> x(K);
    x[0] = rng.gauss();
    for (int k = 1; k < K; ++k) x[k] = 0.9 * x[k - 1] + std::sqrt(1 - 0.81) * rng.gauss();
    for (auto _ : state) {
        benchmark::DoNotOptimize(ess(x));
    }
}
BENCHMARK(BM_ess)->Arg(2000)->Arg(20000);

BENCHMARK_MAIN();
