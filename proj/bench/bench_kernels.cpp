// Serial reference kernels against their OpenMP versions, and one full step.

#include <benchmark/benchmark.h>

#include <vector>

#include "stfe/grid.hpp"
#include "stfe/kernels.hpp"
#include "stfe/noise.hpp"
#include "stfe/solver.hpp"

namespace {

using namespace stfe;

struct Fixture {
    explicit Fixture(int m)
        : p(validate_params(2.5, 3.25, 0.1, 0.01)),
          F(MobilityKind::Fde, p),
          field(decay_noise(16, 3.0, 0.5), m),
          s(init_state(InitialProfile{}, m)),
          f(m), df(m), M(m), out(m), dbeta(field.modes(), 1e-3) {}
    ParamSet p;
    Mobility F;
    NoiseField field;
    GridState s;
    std::vector<double> f, df, M, out, dbeta;
};

template <bool Parallel>
void BM_Mobility(benchmark::State& st) {
    Fixture x(static_cast<int>(st.range(0)));
    for (auto _ : st) {
        if constexpr (Parallel) omp::evaluate_mobility(x.F, x.s.u, x.f, x.df);
        else serial::evaluate_mobility(x.F, x.s.u, x.f, x.df);
        benchmark::DoNotOptimize(x.f.data());
    }
}

template <bool Parallel>
void BM_FluxDrift(benchmark::State& st) {
    Fixture x(static_cast<int>(st.range(0)));
    serial::evaluate_mobility(x.F, x.s.u, x.f, x.df);
    serial::face_mobility(x.f, x.M);
    for (auto _ : st) {
        if constexpr (Parallel) omp::flux_drift(x.s.u, x.M, x.s.h, x.out);
        else serial::flux_drift(x.s.u, x.M, x.s.h, x.out);
        benchmark::DoNotOptimize(x.out.data());
    }
}

template <bool Parallel>
void BM_NoiseDivergence(benchmark::State& st) {
    Fixture x(static_cast<int>(st.range(0)));
    serial::evaluate_mobility(x.F, x.s.u, x.f, x.df);
    for (auto _ : st) {
        if constexpr (Parallel) omp::noise_divergence(x.f, x.field, x.dbeta, x.s.h, x.out);
        else serial::noise_divergence(x.f, x.field, x.dbeta, x.s.h, x.out);
        benchmark::DoNotOptimize(x.out.data());
    }
}

template <bool Parallel>
void BM_StratonovichCorrection(benchmark::State& st) {
    Fixture x(static_cast<int>(st.range(0)));
    serial::evaluate_mobility(x.F, x.s.u, x.f, x.df);
    for (auto _ : st) {
        if constexpr (Parallel) omp::stratonovich_correction(x.f, x.df, x.field, x.s.h, x.out);
        else serial::stratonovich_correction(x.f, x.df, x.field, x.s.h, x.out);
        benchmark::DoNotOptimize(x.out.data());
    }
}

void BM_SemiImplicitStep(benchmark::State& st) {
    SimConfig cfg;
    cfg.m = static_cast<int>(st.range(0));
    cfg.parallel_kernels = st.range(1) != 0;
    const NoiseField field(cfg.noise, cfg.m);
    Stepper stepper(cfg, field);
    GridState s = initial_state(cfg);
    const double dt = default_dt(cfg, s);
    std::vector<double> dbeta(field.modes(), 0.0);
    for (auto _ : st) {
        GridState next = stepper.step(s, dt, dbeta);
        benchmark::DoNotOptimize(next.u.data());
    }
}

}  // namespace

#define SIZES ->RangeMultiplier(4)->Range(64, 4096)
BENCHMARK(BM_Mobility<false>) SIZES;
BENCHMARK(BM_Mobility<true>) SIZES;
BENCHMARK(BM_FluxDrift<false>) SIZES;
BENCHMARK(BM_FluxDrift<true>) SIZES;
BENCHMARK(BM_NoiseDivergence<false>) SIZES;
BENCHMARK(BM_NoiseDivergence<true>) SIZES;
BENCHMARK(BM_StratonovichCorrection<false>) SIZES;
BENCHMARK(BM_StratonovichCorrection<true>) SIZES;
BENCHMARK(BM_SemiImplicitStep)->ArgsProduct({{64, 256, 1024}, {0, 1}});

BENCHMARK_MAIN();
