#include <benchmark/benchmark.h>

#include "convmpt/dual_solver.hpp"
#include "convmpt/evaluation.hpp"
#include "convmpt/filter_opt.hpp"
#include "convmpt/representation.hpp"
#include "convmpt/rng.hpp"
#include "convmpt/synth.hpp"
#include "convmpt/trainer.hpp"

using namespace convmpt;

namespace {

Dataset bench_dataset(int per_class, int d) {
  SynthSpec spec;
  spec.n_pos = per_class;
  spec.n_neg = per_class;
  spec.d = d;
  spec.bag_min = 5;
  spec.bag_max = 20;
  spec.seed = 42;
  return synth_dataset(spec);
}

FilterBank bench_filters(int d, int m) {
  Rng rng(7);
  FilterBank filters;
  filters.activation = Activation::tanh;
  filters.weights.resize(d, m);
  for (Eigen::Index k = 0; k < m; ++k)
    for (Eigen::Index r = 0; r < d; ++r)
      filters.weights(r, k) = 0.2 * rng.gaussian();
  return filters;
}

void BM_EncodeDataset(benchmark::State& state) {
  const int per_class = static_cast<int>(state.range(0));
  const Dataset ds = bench_dataset(per_class, 16);
  const FilterBank filters = bench_filters(16, 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(encode_dataset(filters, ds));
  }
  state.SetItemsProcessed(state.iterations() * ds.n());
}
BENCHMARK(BM_EncodeDataset)->Arg(50)->Arg(200);

void BM_BuildGram(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  Eigen::MatrixXd g(n, 8);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = rng.gaussian();
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_gram(g));
  }
}
BENCHMARK(BM_BuildGram)->Arg(100)->Arg(400);

void BM_SolveDual(benchmark::State& state) {
  const int per_class = static_cast<int>(state.range(0));
  const Dataset ds = bench_dataset(per_class, 16);
  const FilterBank filters = bench_filters(16, 8);
  const DatasetEncoding enc = encode_dataset(filters, ds);
  const DualProblem problem{build_gram(enc.g), ds.labels(), 1.0, 1e-6, -1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_dual(problem));
  }
}
BENCHMARK(BM_SolveDual)->Arg(25)->Arg(100);

void BM_FilterBankUpdate(benchmark::State& state) {
  const Dataset ds = bench_dataset(50, 16);
  const FilterBank filters = bench_filters(16, 8);
  const DatasetEncoding enc = encode_dataset(filters, ds);
  const DualProblem problem{build_gram(enc.g), ds.labels(), 1.0, 1e-6, -1};
  const DualSolution solution = solve_dual(problem);
  for (auto _ : state) {
    benchmark::DoNotOptimize(update_filterbank(filters, solution.delta,
                                               ds.labels(), enc.psi, ds, 0.01,
                                               OptimizerConfig{}));
  }
}
BENCHMARK(BM_FilterBankUpdate);

void BM_TrainConv(benchmark::State& state) {
  const Dataset ds = bench_dataset(25, 16);
  TrainConfig config;
  config.outer_iters = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(train(ds, config));
  }
}
BENCHMARK(BM_TrainConv)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
