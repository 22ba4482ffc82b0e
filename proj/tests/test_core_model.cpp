#include <gtest/gtest.h>

#include "mechlearn/adversaries.hpp"
#include "mechlearn/model.hpp"
#include "mechlearn/scenario_json.hpp"
#include "test_support.hpp"

namespace {

using namespace mechlearn;

Scenario single_minded(int m, std::vector<ItemSet> demands, std::vector<BuyerId> order) {
  Scenario s;
  s.n = static_cast<int>(demands.size());
  s.m = m;
  s.value_cap = 1;
  s.true_order = std::move(order);
  s.valuation_class = ValuationClass::kSingleMinded;
  for (auto& d : demands) s.valuations.emplace_back(SingleMinded{d, 1});
  return s;
}

// Independent reference over item bitmasks: serve arrivals sorted by true
// position and apply each class's choice rule to the items still left.
Allocation reference_allocate(const Scenario& s, const Round& r) {
  const std::vector<int> p = effective_prices(s, r);
  const std::vector<int> pos = mltest::true_positions(s);
  BuyerSet arrivals = r.arrival;
  std::sort(arrivals.begin(), arrivals.end(), [&](int a, int b) { return pos[a] < pos[b]; });
  Allocation out = empty_allocation(s.n);
  std::uint32_t left = (1U << s.m) - 1;
  for (BuyerId i : arrivals) {
    std::uint32_t pick = 0;
    if (const auto* sm = std::get_if<SingleMinded>(&s.valuations[i])) {
      std::uint32_t d = 0;
      for (int e : sm->demand_set) d |= 1U << e;
      if ((d & left) == d) pick = d;
    } else if (const auto* add = std::get_if<Additive>(&s.valuations[i])) {
      for (int e = 0; e < s.m; ++e) {
        if ((left >> e & 1U) && add->values[e] > p[e]) pick |= 1U << e;
      }
    } else {
      const auto& v = std::get<UnitDemand>(s.valuations[i]).values;
      int best = 0;
      for (int e = 0; e < s.m; ++e) {
        if ((left >> e & 1U) && v[e] - p[e] > best) {
          best = v[e] - p[e];
          pick = 1U << e;
        }
      }
    }
    for (int e = 0; e < s.m; ++e) {
      if (pick >> e & 1U) out.bundles[i].push_back(e);
    }
    left &= ~pick;
  }
  return out;
}

TEST(Allocate, PaperHelpExample) {
  // a = 0, b = 1, c = 2; D_a = {0}, D_c = {0, 1}, D_b = {1}; a > c > b.
  const Scenario s = single_minded(2, {{0}, {1}, {0, 1}}, {0, 2, 1});
  Allocation x = allocate(s, {{0, 1, 2}, std::nullopt});
  EXPECT_EQ(x.bundles[0], ItemSet{0});
  EXPECT_TRUE(x.bundles[2].empty());
  EXPECT_EQ(x.bundles[1], ItemSet{1});
  x = allocate(s, {{1, 2}, std::nullopt});
  EXPECT_EQ(x.bundles[2], (ItemSet{0, 1}));
  EXPECT_TRUE(x.bundles[1].empty());
}

TEST(Allocate, SingletonSingleMindedGetsDemandSet) {
  const Scenario s = single_minded(3, {{0, 2}, {1}, {0, 1, 2}}, {2, 1, 0});
  for (BuyerId i = 0; i < 3; ++i) {
    const Allocation x = allocate(s, {{i}, std::nullopt});
    EXPECT_EQ(x.bundles[i], std::get<SingleMinded>(s.valuations[i]).demand_set);
  }
}

TEST(Allocate, UnitDemandHandExample) {
  Scenario s;
  s.n = 2;
  s.m = 2;
  s.value_cap = 10;
  s.true_order = {0, 1};
  s.valuation_class = ValuationClass::kUnitDemand;
  s.valuations = {UnitDemand{{5, 3}}, UnitDemand{{4, 4}}};
  s.price_mode = PriceMode::kVariable;
  const Allocation x = allocate(s, {{0, 1}, std::vector<int>{2, 2}});
  EXPECT_EQ(x.bundles[0], ItemSet{0});
  EXPECT_EQ(x.bundles[1], ItemSet{1});
}

TEST(Allocate, UnitDemandTieGoesToLowestItem) {
  Scenario s;
  s.n = 1;
  s.m = 3;
  s.value_cap = 10;
  s.true_order = {0};
  s.valuation_class = ValuationClass::kUnitDemand;
  s.valuations = {UnitDemand{{2, 7, 7}}};
  EXPECT_EQ(allocate(s, {{0}, std::nullopt}).bundles[0], ItemSet{1});
}

TEST(Allocate, RejectsBadRounds) {
  const Scenario s = single_minded(2, {{0}, {1}}, {0, 1});
  EXPECT_THROW(allocate(s, {{0, 2}, std::nullopt}), InputError);
  EXPECT_THROW(allocate(s, {{}, std::nullopt}), InputError);
  EXPECT_THROW(allocate(s, {{1, 0}, std::nullopt}), InputError);
  EXPECT_THROW(allocate(s, {{0}, std::vector<int>{0, 0}}), InputError);
  Scenario v = s;
  v.price_mode = PriceMode::kVariable;
  EXPECT_THROW(allocate(v, {{0}, std::vector<int>{0}}), InputError);
  EXPECT_THROW(allocate(v, {{0}, std::nullopt}), InputError);
  EXPECT_THROW(allocate(v, {{0}, std::vector<int>{0, 2}}), InputError);
}

TEST(Observe, Examples) {
  const Allocation x{{{0}, {}, {1}}};
  EXPECT_EQ(observe(x, ObservationKind::kWinnerSet), Observation(WinnerSet{{0, 2}}));
  EXPECT_EQ(observe(empty_allocation(3), ObservationKind::kWinnerSet),
            Observation(WinnerSet{{}}));
  const Allocation y{{{0}, {}}};
  EXPECT_EQ(observe(y, ObservationKind::kAllocation), Observation(y));
}

TEST(ValidateScenario, Examples) {
  Scenario s = single_minded(2, {{0}, {1}}, {1, 0});
  EXPECT_TRUE(validate_scenario(s).empty());

  s.true_order = {1, 1};
  const auto bad_order = validate_scenario(s);
  ASSERT_FALSE(bad_order.empty());
  EXPECT_NE(bad_order.front().find("not a permutation"), std::string::npos);

  Scenario a;
  a.n = 1;
  a.m = 2;
  a.value_cap = 10;
  a.true_order = {0};
  a.valuation_class = ValuationClass::kAdditive;
  a.valuations = {Additive{{12, 3}}};
  const auto over = validate_scenario(a);
  ASSERT_EQ(over.size(), 1u);
  EXPECT_NE(over.front().find("value exceeds cap"), std::string::npos);
}

TEST(ValidateScenario, ReportsEveryViolation) {
  Scenario s = single_minded(2, {{}, {5}}, {0, 0});
  s.value_cap = 0;
  EXPECT_GE(validate_scenario(s).size(), 4u);
}

TEST(TrueRanks, AreOneBased) {
  const Scenario s = single_minded(1, {{0}, {0}, {0}}, {2, 0, 1});
  EXPECT_EQ(true_ranks(s), (std::vector<int>{2, 3, 1}));
}

// ---- properties over random scenarios --------------------------------------

struct Case {
  ValuationClass c;
  PriceMode mode;
};

void PrintTo(const Case& k, std::ostream* os) {
  static const char* classes[] = {"single_minded", "additive", "unit_demand"};
  *os << classes[static_cast<int>(k.c)] << (k.mode == PriceMode::kFixed ? "_fixed" : "_variable");
}

class AllocateProperties : public ::testing::TestWithParam<Case> {};

TEST_P(AllocateProperties, MatchReferenceAndInvariants) {
  const auto [c, mode] = GetParam();
  SplitMix64 rng(1000 + static_cast<int>(c) * 10 + static_cast<int>(mode));
  for (int trial = 0; trial < 150; ++trial) {
    GeneratorParams g = mltest::random_params(rng, c, mode, ObservationKind::kAllocation,
                                              {1, 6, 1, 5, 12});
    const Scenario s = gen_random_scenario(rng(), g);
    ASSERT_TRUE(validate_scenario(s).empty());
    for (int k = 0; k < 20; ++k) {
      const Round r = gen_random_round(s, rng);
      const Allocation x = allocate(s, r);
      ASSERT_EQ(x, allocate(s, r)) << "not deterministic";
      ASSERT_EQ(x, reference_allocate(s, r));
      std::vector<int> seen(s.m, 0);
      for (BuyerId i = 0; i < s.n; ++i) {
        if (!contains(r.arrival, i)) ASSERT_TRUE(x.bundles[i].empty());
        for (ItemId e : x.bundles[i]) ASSERT_EQ(seen[e]++, 0) << "bundles overlap";
        if (c == ValuationClass::kUnitDemand) ASSERT_LE(x.bundles[i].size(), 1u);
        if (c == ValuationClass::kSingleMinded && !x.bundles[i].empty()) {
          ASSERT_EQ(x.bundles[i], std::get<SingleMinded>(s.valuations[i]).demand_set);
        }
      }
      const auto w = std::get<WinnerSet>(observe(x, ObservationKind::kWinnerSet)).winners;
      for (BuyerId i = 0; i < s.n; ++i) {
        ASSERT_EQ(contains(w, i), !x.bundles[i].empty());
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(
    Classes, AllocateProperties,
    ::testing::Values(Case{ValuationClass::kSingleMinded, PriceMode::kFixed},
                      Case{ValuationClass::kAdditive, PriceMode::kFixed},
                      Case{ValuationClass::kAdditive, PriceMode::kVariable},
                      Case{ValuationClass::kUnitDemand, PriceMode::kFixed},
                      Case{ValuationClass::kUnitDemand, PriceMode::kVariable}),
    [](const auto& info) { return ::testing::PrintToString(info.param); });

TEST(AllocateMonotonicity, AdditiveShrinksWithMoreArrivals) {
  SplitMix64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    GeneratorParams g = mltest::random_params(rng, ValuationClass::kAdditive, PriceMode::kFixed,
                                              ObservationKind::kAllocation, {2, 7, 1, 6, 10});
    const Scenario s = gen_random_scenario(rng(), g);
    const Round big = gen_random_round(s, rng, 0.8);
    BuyerSet sub;
    for (BuyerId i : big.arrival) {
      if (rng.bernoulli(0.5)) sub.push_back(i);
    }
    if (sub.empty()) continue;
    const Allocation xs = allocate(s, big);
    const Allocation xsub = allocate(s, {sub, std::nullopt});
    for (BuyerId i : sub) {
      ASSERT_TRUE(is_subset(xs.bundles[i], xsub.bundles[i]))
          << "more buyers gave buyer " << i << " more items";
    }
  }
}

TEST(ScenarioJson, RoundTripsAndRejectsGarbage) {
  SplitMix64 rng(5);
  for (auto c : {ValuationClass::kSingleMinded, ValuationClass::kAdditive,
                 ValuationClass::kUnitDemand}) {
    for (int trial = 0; trial < 20; ++trial) {
      GeneratorParams g = mltest::random_params(rng, c, PriceMode::kVariable,
                                                ObservationKind::kAllocation, {1, 5, 1, 4, 20});
      const Scenario s = gen_random_scenario(rng(), g);
      const std::string text = scenario_to_json(s);
      EXPECT_EQ(scenario_from_json(text), s);
      EXPECT_EQ(scenario_to_json(scenario_from_json(text)), text);
    }
  }
  EXPECT_THROW(scenario_from_json("{"), InputError);
  EXPECT_THROW(scenario_from_json(R"({"n": 1})"), InputError);
  EXPECT_THROW(
      scenario_from_json(R"({"n":1,"m":1,"V":1,"order":[0],"valuation_class":"bogus",
        "valuations":[[1]],"observation_kind":"allocation","price_mode":"fixed"})"),
      InputError);
  EXPECT_THROW(
      scenario_from_json(R"({"n":2,"m":1,"V":1,"order":[0,0],"valuation_class":"additive",
        "valuations":[[1],[0]],"observation_kind":"allocation","price_mode":"fixed"})"),
      InputError);
}

}  // namespace
