#include <benchmark/benchmark.h>

#include "isinglearn/ensembles.hpp"
#include "isinglearn/exact.hpp"
#include "isinglearn/mple.hpp"
#include "isinglearn/optimizer.hpp"
#include "isinglearn/projections.hpp"
#include "isinglearn/sampler.hpp"

using namespace isinglearn;

namespace {

IsingModel sk(int n, double beta, std::uint64_t seed = 1) {
  EnsembleSpec spec;
  spec.kind = EnsembleKind::SK;
  spec.n = n;
  spec.beta = beta;
  spec.seed = seed;
  return generate(spec);
}

void BM_MpleGradient(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int l = static_cast<int>(state.range(1));
  const IsingModel m = sk(n, 0.2);
  GlauberConfig cfg = GlauberConfig::defaults(2);
  const SampleBatch batch = glauber_sample(m, l, cfg);
  const PseudolikelihoodContext ctx(batch, m.field);
  CouplingMatrix j = sk(n, 0.2, 3).coupling;
  for (auto _ : state) {
    j = j + 1e-9 * m.coupling;  // defeat the local-field cache
    benchmark::DoNotOptimize(ctx.evaluate(j));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(l) * n * n);
}
BENCHMARK(BM_MpleGradient)->Args({8, 1000})->Args({32, 4000})->Args({100, 10000});

void BM_Projection(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const CouplingMatrix j = sk(n, 2.0).coupling;
  const std::array<ConstraintSet, 4> sets = {OpNormBall{0.8}, SpectralSpread{0.9}, WidthBall{1.2},
                                             AntiferroSpike{0.4, 1.5}};
  const ConstraintSet& set = sets[static_cast<std::size_t>(state.range(1))];
  state.SetLabel(describe(set));
  for (auto _ : state) benchmark::DoNotOptimize(project(set, j));
}
BENCHMARK(BM_Projection)->ArgsProduct({{8, 64}, {0, 1, 2, 3}});

void BM_Distribution(benchmark::State& state) {
  const IsingModel m = sk(static_cast<int>(state.range(0)), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(distribution(m));
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << state.range(0)));
}
BENCHMARK(BM_Distribution)->DenseRange(8, 16, 4);

void BM_Glauber(benchmark::State& state) {
  const IsingModel m = sk(static_cast<int>(state.range(0)), 0.2);
  GlauberConfig cfg = GlauberConfig::defaults(4);
  cfg.burn_in_sweeps = 10;
  for (auto _ : state) benchmark::DoNotOptimize(glauber_sample(m, 1000, cfg));
}
BENCHMARK(BM_Glauber)->Arg(8)->Arg(64);

void BM_Fit(benchmark::State& state) {
  const IsingModel m = sk(8, 0.2);
  const SampleBatch batch = exact_sample(m, static_cast<int>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(fit_mple(batch, m.field, OpNormBall{1.0}));
}
BENCHMARK(BM_Fit)->Arg(1000)->Arg(16000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
