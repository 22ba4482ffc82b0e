#include <benchmark/benchmark.h>

#include "mechlearn/linext.hpp"
#include "mechlearn/rng.hpp"

namespace {

using namespace mechlearn;

// Random order on k elements with about k comparable pairs.
PartialOrder sparse_order(int k, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<int> hidden(k);
  for (int i = 0; i < k; ++i) hidden[i] = i;
  rng.shuffle(hidden);
  PartialOrder po(k);
  for (int e = 0; e < k; ++e) {
    int a = rng.between(0, k - 1), b = rng.between(0, k - 1);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    po.add_constraint(hidden[a], hidden[b]);
  }
  return po;
}

void BM_CountExtensions(benchmark::State& state) {
  const PartialOrder po = sparse_order(static_cast<int>(state.range(0)), 9);
  for (auto _ : state) benchmark::DoNotOptimize(count_linear_extensions(po));
}
BENCHMARK(BM_CountExtensions)->Arg(8)->Arg(14)->Arg(20);

void BM_SamplerBuild(benchmark::State& state) {
  const PartialOrder po = sparse_order(static_cast<int>(state.range(0)), 9);
  for (auto _ : state) {
    LinearExtensionSampler sampler(po);
    benchmark::DoNotOptimize(sampler.exact());
  }
}
BENCHMARK(BM_SamplerBuild)->Arg(16)->Arg(32)->Arg(64);

void BM_SamplerDraw(benchmark::State& state) {
  const PartialOrder po = sparse_order(static_cast<int>(state.range(0)), 9);
  const LinearExtensionSampler sampler(po);
  SplitMix64 rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(rng));
  state.SetLabel(sampler.exact() ? "exact" : "mcmc");
}
BENCHMARK(BM_SamplerDraw)->Arg(16)->Arg(32)->Arg(64);

void BM_McmcWalk(benchmark::State& state) {
  const PartialOrder po = sparse_order(32, 9);
  SplitMix64 rng(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_linear_extension_mcmc(po, rng, state.range(0)));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_McmcWalk)->Arg(1 << 10)->Arg(1 << 14);

}  // namespace
