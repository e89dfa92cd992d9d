#include <benchmark/benchmark.h>

#include "semiwig/averaging.hpp"
#include "semiwig/evolution.hpp"
#include "semiwig/madelung.hpp"
#include "semiwig/purity.hpp"
#include "semiwig/wigner.hpp"

using namespace semiwig;

static void BM_WignerTransform(benchmark::State& st) {
  const auto g = SpatialGrid::centered(static_cast<std::size_t>(st.range(0)), 16.0);
  const auto s = QuantumState(coherent_state(g, 0.5, 0.5, 0.2));
  for (auto _ : st) benchmark::DoNotOptimize(wigner_transform(s));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_WignerTransform)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond);

static void BM_SplitStep(benchmark::State& st) {
  const auto g = SpatialGrid::centered(static_cast<std::size_t>(st.range(0)), 16.0);
  const SplitStepPropagator prop(Box(g), Potential::harmonic(1.0, 1.0), 0.1, 1e-3, 1.0);
  auto samples = coherent_state(g, 1.0, 0.0, 0.1).samples();
  for (auto _ : st) {
    prop.step(samples);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_SplitStep)->RangeMultiplier(4)->Range(256, 4096);

static void BM_WignerStep(benchmark::State& st) {
  const auto g = SpatialGrid::centered(static_cast<std::size_t>(st.range(0)), 16.0);
  auto w = wigner_transform(QuantumState(coherent_state(g, 1.0, 0.0, 0.2)));
  const auto v = Potential::harmonic(1.0, 1.0);
  for (auto _ : st) w = wigner_step(w, v, 1e-3, 1.0);
}
BENCHMARK(BM_WignerStep)->RangeMultiplier(2)->Range(128, 512)->Unit(benchmark::kMillisecond);

static void BM_TatarskiiResiduals(benchmark::State& st) {
  const auto g = SpatialGrid::centered(static_cast<std::size_t>(st.range(0)), 16.0);
  const auto s = mixed_state({harmonic_eigenstate(g, 0, 0.5), harmonic_eigenstate(g, 1, 0.5)}, {0.7, 0.3});
  for (auto _ : st) benchmark::DoNotOptimize(tatarskii_residuals(s));
}
BENCHMARK(BM_TatarskiiResiduals)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_MadelungRhs(benchmark::State& st) {
  const auto g = SpatialGrid::centered(static_cast<std::size_t>(st.range(0)), 6.0);
  const auto f = fluid_from_wave(periodic_coherent_state(g, 0.0, 2 * 3.141592653589793 / 6.0, 1.0));
  const auto v = Potential::harmonic(1.0, 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(madelung_rhs(f, v, 1e-12));
}
BENCHMARK(BM_MadelungRhs)->RangeMultiplier(4)->Range(128, 2048);

static void BM_SobolevNorm(benchmark::State& st) {
  const auto g = SpatialGrid::centered(static_cast<std::size_t>(st.range(0)), 20.0);
  SpaceTimeField f{std::vector<double>(64), g, Array2<double>(64, g.n())};
  for (std::size_t t = 0; t < 64; ++t) {
    f.times[t] = 0.05 * static_cast<double>(t);
    for (std::size_t i = 0; i < g.n(); ++i) f.values(t, i) = std::exp(-g.node(i) * g.node(i)) * (1 + 0.1 * t);
  }
  for (auto _ : st) benchmark::DoNotOptimize(hs_norm(f, 0.25));
}
BENCHMARK(BM_SobolevNorm)->Arg(256)->Arg(1024);
BENCHMARK_MAIN();
