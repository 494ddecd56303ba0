#include <benchmark/benchmark.h>

#include "socdiff/diffusion.hpp"
#include "socdiff/harness.hpp"

namespace {

socdiff::CombinedNetwork fixture(std::int64_t users_per_community) {
  socdiff::SynthParams params;
  params.users_per_community = static_cast<std::size_t>(users_per_community);
  params.items_per_community = static_cast<std::size_t>(users_per_community);
  params.intra_collect = 20.0 / static_cast<double>(users_per_community);
  params.intra_friend = 10.0 / static_cast<double>(users_per_community);
  return socdiff::synth_generate(params);
}

void BM_md_scores(benchmark::State& state) {
  const auto net = fixture(state.range(0));
  socdiff::UserId target = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(socdiff::md_scores(net.bipartite(), target));
    target = (target + 1) % static_cast<socdiff::UserId>(net.n_users());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_md_scores)->Arg(100)->Arg(1000)->Arg(4000);

void BM_smd_scores(benchmark::State& state) {
  const auto net = fixture(state.range(0));
  socdiff::UserId target = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(socdiff::smd_scores(net, target, 0.7));
    target = (target + 1) % static_cast<socdiff::UserId>(net.n_users());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_smd_scores)->Arg(100)->Arg(1000)->Arg(4000);

void BM_hybrid_scores(benchmark::State& state) {
  const auto net = fixture(state.range(0));
  socdiff::UserId target = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(socdiff::hybrid_scores(net.bipartite(), target, 0.5));
    target = (target + 1) % static_cast<socdiff::UserId>(net.n_users());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_hybrid_scores)->Arg(1000);

void BM_evaluate_run(benchmark::State& state) {
  const auto net = fixture(state.range(0));
  socdiff::ExperimentConfig config;
  config.runs = 1;
  config.master_seed = 1;
  config.kernel = socdiff::KernelSpec::smd(0.7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(socdiff::run_evaluation(net, config));
  }
}
BENCHMARK(BM_evaluate_run)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
