#include <benchmark/benchmark.h>

#include "pcdfpca/model.hpp"
#include "pcdfpca/numerics.hpp"
#include "pcdfpca/simbench.hpp"
#include "pcdfpca/spectral.hpp"

namespace {

using namespace pcdfpca;

ComplexMatrix random_hermitian(std::size_t n) {
  Rng rng(n);
  ComplexMatrix h(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    h(r, r) = rng.normal();
    for (std::size_t c = r + 1; c < n; ++c) {
      h(r, c) = Complex(rng.normal(), rng.normal());
      h(c, r) = std::conj(h(r, c));
    }
  }
  return h;
}

void BM_HermitianEig(benchmark::State& state) {
  const HermitianMatrix h(random_hermitian(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(hermitian_eig(h));
}
BENCHMARK(BM_HermitianEig)->Arg(7)->Arg(14)->Arg(21)->Arg(42);

void BM_SpectralDensity(benchmark::State& state) {
  const FunctionalSeries x = gen_scenario_a(1);
  const FrequencyGrid grid(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(spectral_density(x, 3, 3, Kernel::bartlett, grid));
}
BENCHMARK(BM_SpectralDensity)->Arg(128)->Arg(512);

void BM_Fit(benchmark::State& state) {
  const FunctionalSeries x = gen_scenario_a(1).slice(0, 150);
  const FitOptions opts{static_cast<std::size_t>(state.range(0)), 1, 3, Kernel::bartlett, 512, Truncation::fixed(2)};
  for (auto _ : state) benchmark::DoNotOptimize(fit(x, opts));
}
BENCHMARK(BM_Fit)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_TransformReconstruct(benchmark::State& state) {
  const FunctionalSeries x = gen_scenario_b(1);
  const PcDfpcaModel model = fit(x, FitOptions{2, 1, 3, Kernel::bartlett, 512, Truncation::fixed(2)});
  for (auto _ : state) {
    const ScoreSeries s = transform(model, x);
    benchmark::DoNotOptimize(reconstruct(model, s, x.size()));
  }
}
BENCHMARK(BM_TransformReconstruct)->Unit(benchmark::kMillisecond);

void BM_Replication(benchmark::State& state) {
  const ScenarioSpec spec = state.range(0) == 0 ? ScenarioSpec::scenario_a() : ScenarioSpec::scenario_b();
  std::size_t rep = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_replication(spec, rep++));
}
BENCHMARK(BM_Replication)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
