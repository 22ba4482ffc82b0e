#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "mechlearn/adversaries.hpp"
#include "mechlearn/harness.hpp"
#include "mechlearn/learners_priced.hpp"

namespace {

using namespace mechlearn;

Scenario scenario_for(LearnerKind kind, int n, int m) {
  GeneratorParams g;
  g.n = n;
  g.m = m;
  switch (kind) {
    case LearnerKind::kWinners:
    case LearnerKind::kSingleItem:
      g.observation_kind = ObservationKind::kWinnerSet;
      if (kind == LearnerKind::kSingleItem) g.m = 1;
      break;
    case LearnerKind::kSingleMindedAlloc: break;
    case LearnerKind::kAdditiveFixed: g.valuation_class = ValuationClass::kAdditive; break;
    case LearnerKind::kUnitDemandGhost:
      g.positive_values = true;
      [[fallthrough]];
    case LearnerKind::kUnitDemandPrime: g.valuation_class = ValuationClass::kUnitDemand; break;
    case LearnerKind::kAdditiveVariable:
      g.valuation_class = ValuationClass::kAdditive;
      g.price_mode = PriceMode::kVariable;
      break;
    case LearnerKind::kUnitVariable:
      g.valuation_class = ValuationClass::kUnitDemand;
      g.price_mode = PriceMode::kVariable;
      break;
  }
  return gen_random_scenario(11, g);
}

// Whole learning run: rounds per second including the mistakes.
void BM_RunTrace(benchmark::State& state) {
  const auto kind = static_cast<LearnerKind>(state.range(0));
  const Scenario s = scenario_for(kind, 8, 4);
  const auto rounds = random_rounds(s, 500, 13);
  long mistakes = 0;
  for (auto _ : state) {
    auto learner = make_learner(kind, s, 17);
    mistakes = run_trace(s, *learner, rounds, {}, false).summary.total_mistakes;
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(rounds.size()));
  state.SetLabel(std::string(to_string(kind)) + " mistakes=" + std::to_string(mistakes));
}
BENCHMARK(BM_RunTrace)->DenseRange(0, 7)->Unit(benchmark::kMillisecond);

// Predictions of an already converged learner.
void BM_PredictConverged(benchmark::State& state) {
  const auto kind = static_cast<LearnerKind>(state.range(0));
  const Scenario s = scenario_for(kind, 8, 4);
  const auto rounds = random_rounds(s, 256, 19);
  auto learner = make_learner(kind, s, 23);
  for (int pass = 0; pass < 20; ++pass) run_trace(s, *learner, rounds, {}, false);
  std::size_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(learner->predict(rounds[k++ & 255]));
  state.SetLabel(to_string(kind));
}
BENCHMARK(BM_PredictConverged)->DenseRange(0, 7);

void BM_EllipsoidCut(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  Ellipsoid el(m, 64);
  SplitMix64 rng(29);
  Eigen::VectorXd a(m);
  for (auto _ : state) {
    if (el.cuts() >= 8 * m * m) el.reset();
    for (int i = 0; i < m; ++i) a[i] = rng.between(-1, 1);
    if (a.isZero(0.0)) a[0] = 1;
    benchmark::DoNotOptimize(el.cut(a, a.dot(el.center())));
  }
}
BENCHMARK(BM_EllipsoidCut)->Arg(2)->Arg(8)->Arg(32);

}  // namespace
