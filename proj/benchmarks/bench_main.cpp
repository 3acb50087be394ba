#include <benchmark/benchmark.h>

#include "sgvi/dataset.hpp"
#include "sgvi/emd.hpp"
#include "sgvi/estimators.hpp"
#include "sgvi/experiment.hpp"
#include "sgvi/learning.hpp"
#include "sgvi/random_instance.hpp"
#include "sgvi/sampler.hpp"

namespace {

using namespace sgvi;

void BM_GumbelSoftmax(benchmark::State& state) {
  const auto v = static_cast<std::size_t>(state.range(0));
  const VariationalParams pi = VariationalParams::uniform(v);
  Rng rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gumbel_softmax(pi, sample_gumbel(v, rng), 0.5));
  }
}
BENCHMARK(BM_GumbelSoftmax)->Arg(5)->Arg(50);

void BM_DrawBatch(benchmark::State& state) {
  const auto s = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  const Vector logits = random_logits(5, 1.0, rng);
  const VariationalParams pi = VariationalParams::uniform(5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(iw_bound(draw_batch(pi, logits, 0.5, s, rng)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s));
}
BENCHMARK(BM_DrawBatch)->Arg(20)->Arg(5000);

void BM_DregGradient(benchmark::State& state) {
  Rng rng(3);
  const Vector logits = random_logits(5, 1.0, rng);
  const VariationalParams pi = VariationalParams::from(softmax(random_logits(5, 1.0, rng)));
  const Vector lambda = q_logits(pi);
  const SampleBatch batch = draw_batch(pi, logits, 0.5, 20, rng);
  for (auto _ : state) benchmark::DoNotOptimize(dreg_gradient(batch, logits, lambda));
}
BENCHMARK(BM_DregGradient);

void BM_OptimizeLocal(benchmark::State& state) {
  Rng rng(4);
  const Vector logits = random_logits(5, 2.0, rng);
  EmdConfig cfg;
  cfg.samples = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(optimize_local(logits, cfg, 0.5, ++seed));
}
BENCHMARK(BM_OptimizeLocal)->Arg(1)->Arg(20);

void BM_TrainIteration(benchmark::State& state) {
  RunConfig cfg;
  cfg.data.num_train = 24;
  cfg.data.num_test = 1;
  cfg.train.iterations = 1;
  cfg.train.samples_learn = static_cast<std::size_t>(state.range(0));
  const Dataset data = generate_dataset(cfg.data);
  const PotentialModel init = initial_model(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(train(data.train, init, cfg.train).log.back().loss);
}
BENCHMARK(BM_TrainIteration)->Arg(1)->Arg(5000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
