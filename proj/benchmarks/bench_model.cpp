#include <benchmark/benchmark.h>

#include "mechlearn/adversaries.hpp"
#include "mechlearn/harness.hpp"
#include "mechlearn/model.hpp"

namespace {

using namespace mechlearn;

void BM_Allocate(benchmark::State& state) {
  GeneratorParams g;
  g.n = static_cast<int>(state.range(0));
  g.m = 8;
  g.valuation_class = static_cast<ValuationClass>(state.range(1));
  g.price_mode = g.valuation_class == ValuationClass::kSingleMinded ? PriceMode::kFixed
                                                                     : PriceMode::kVariable;
  const Scenario s = gen_random_scenario(3, g);
  const auto rounds = random_rounds(s, 256, 5);
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(allocate(s, rounds[k++ & 255]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Allocate)->ArgsProduct({{8, 64}, {0, 1, 2}});

}  // namespace

BENCHMARK_MAIN();
