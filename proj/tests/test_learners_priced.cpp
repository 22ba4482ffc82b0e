#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "mechlearn/harness.hpp"
#include "mechlearn/learners_priced.hpp"
#include "test_support.hpp"

namespace {

using namespace mechlearn;
using Kind = LearnerEvent::Kind;
using Eigen::VectorXd;

Round priced(BuyerSet s, std::vector<int> p) { return Round{std::move(s), std::move(p)}; }

Observation buys(std::vector<ItemSet> bundles) { return Allocation{std::move(bundles)}; }

bool has_kind(const std::vector<LearnerEvent>& ev, Kind k) {
  return std::any_of(ev.begin(), ev.end(), [&](const LearnerEvent& e) { return e.kind == k; });
}

int ceil_log2(int x) {
  int k = 0;
  while ((1 << k) < x) ++k;
  return k;
}

// ---- interval learner --------------------------------------------------------

TEST(AdditiveVariableLearner, HandRunBinarySearch) {
  AdditiveVariableLearner l(1, 1, 8);
  EXPECT_EQ(l.predict(priced({0}, {4})), buys({{}}));
  const auto ev = l.update(priced({0}, {4}), buys({{0}}));
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(to_token(ev[0]), "cut:b0:i0:lo=5");
  EXPECT_EQ(l.intervals().lo(0, 0), 5);
  EXPECT_EQ(l.intervals().estimate(0, 0), 6);
  EXPECT_EQ(l.predict(priced({0}, {6})), buys({{}}));
  EXPECT_TRUE(l.update(priced({0}, {6}), buys({{}})).empty());
}

TEST(AdditiveVariableLearner, PricesAtCapBuyNothing) {
  SplitMix64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rng.between(1, 4), m = rng.between(1, 4), V = rng.between(1, 50);
    AdditiveVariableLearner l(n, m, V);
    bool overflow = false;
    // Drive the intervals with random rounds first, then check.
    for (int t = 0; t < 20; ++t) {
      const BuyerSet s{static_cast<BuyerId>(rng.below(n))};
      std::vector<int> p(m);
      for (int& x : p) x = rng.between(0, V);
      Allocation a = empty_allocation(n);
      for (ItemId e = 0; e < m; ++e) {
        if (rng.bernoulli(0.5) && p[e] < V) a.bundles[s[0]].push_back(e);
      }
      try {
        l.update(priced(s, p), a);
      } catch (const DemotionOverflow&) {
        // Random truths may be inconsistent; the learner is done then.
        overflow = true;
        break;
      }
    }
    if (overflow) continue;
    BuyerSet all(n);
    std::iota(all.begin(), all.end(), 0);
    EXPECT_EQ(l.predict(priced(all, std::vector<int>(m, V))), Observation(empty_allocation(n)));
  }
}

TEST(AdditiveVariableLearner, EmptyIntervalDemotesAndResets) {
  AdditiveVariableLearner l(2, 1, 8);
  // Fresh estimate 4.
  auto ev = l.update(priced({0}, {5}), buys({{0}, {}}));
  EXPECT_EQ(to_token(ev.at(0)), "cut:b0:i0:lo=6");
  EXPECT_TRUE(l.update(priced({0}, {7}), buys({{}, {}})).empty());  // 7 > 7 fails
  ev = l.update(priced({0}, {6}), buys({{}, {}}));
  EXPECT_EQ(to_token(ev.at(0)), "cut:b0:i0:hi=6");
  ev = l.update(priced({0}, {5}), buys({{}, {}}));  // hi = 5 < lo = 6
  ASSERT_EQ(ev.size(), 3u);
  EXPECT_EQ(to_token(ev[0]), "cut:b0:i0:hi=5");
  EXPECT_EQ(to_token(ev[1]), "demote:b0");
  EXPECT_EQ(to_token(ev[2]), "reset:b0");
  EXPECT_EQ(l.intervals().lo(0, 0), 0);
  EXPECT_EQ(l.intervals().hi(0, 0), 8);
  EXPECT_EQ(l.level_order()->level(0), 2);
}

// Every cut at least halves the interval, so a (buyer, item) pair takes at
// most ceil(log2(V+1)) cuts between resets.
TEST(AdditiveVariableLearner, WidthHalvesPerConstraint) {
  SplitMix64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const Scenario s = mltest::random_scenario_for(LearnerKind::kAdditiveVariable, rng,
                                                   {1, 5, 1, 5, 1024});
    AdditiveVariableLearner l(s.n, s.m, s.value_cap);
    std::vector<int> cuts(s.n * s.m, 0);
    for (const Round& r : random_rounds(s, 600, rng())) {
      std::vector<int> width(s.n * s.m);
      for (BuyerId i = 0; i < s.n; ++i)
        for (ItemId e = 0; e < s.m; ++e)
          width[i * s.m + e] = l.intervals().hi(i, e) - l.intervals().lo(i, e) + 1;
      const auto ev = l.update(r, observe(allocate(s, r), ObservationKind::kAllocation));
      const bool reset = has_kind(ev, Kind::kReset);
      for (const auto& e : ev) {
        if (e.kind != Kind::kIntervalCut) continue;
        const int k = e.buyer * s.m + e.item;
        ++cuts[k];
        ASSERT_LE(cuts[k], ceil_log2(s.value_cap + 1));
        if (!reset) {
          const int w = l.intervals().hi(e.buyer, e.item) - l.intervals().lo(e.buyer, e.item) + 1;
          ASSERT_LE(2 * std::max(w, 0), width[k]);
        }
      }
      if (reset) {
        for (ItemId e = 0; e < s.m; ++e) cuts[ev.front().buyer * s.m + e] = 0;
      }
    }
  }
}

// ---- ellipsoid -------------------------------------------------------------------

TEST(Ellipsoid, FreshCenterAndCap) {
  const Ellipsoid el(3, 64);
  EXPECT_TRUE(el.center().isApprox(VectorXd::Constant(3, 32.0)));
  EXPECT_EQ(el.cuts(), 0);
  EXPECT_TRUE(el.feasible());
  const double expected =
      std::ceil(16.0 * 9 * (std::log2(66.0) + std::log2(4.0) + 2.0));
  EXPECT_EQ(Ellipsoid::cut_cap(3, 64), static_cast<int>(expected));
  EXPECT_EQ(el.cap(), Ellipsoid::cut_cap(3, 64));
  // Radius (V+1) sqrt(m) ball covers the box corners.
  EXPECT_TRUE(el.contains(VectorXd::Zero(3)));
  EXPECT_TRUE(el.contains(VectorXd::Constant(3, 64.0)));
}

TEST(Ellipsoid, CenterMovesIntoKeptHalfspace) {
  SplitMix64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = rng.between(1, 5);
    Ellipsoid el(m, 32);
    VectorXd a(m);
    for (int k = 0; k < m; ++k) a[k] = rng.between(-1, 1);
    if (a.isZero()) a[0] = 1;
    const double before = a.dot(el.center());
    el.cut(a, before + 0.5);
    EXPECT_GT(a.dot(el.center()), before);
  }
}

TEST(Ellipsoid, ScalarCaseIsMidpointStepping) {
  SplitMix64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int V = rng.between(1, 200);
    Ellipsoid el(1, V);
    double c = V / 2.0, r = V + 1.0;
    for (int step = 0; step < 12 && el.feasible(); ++step) {
      VectorXd a(1);
      if (rng.bernoulli(0.5)) {
        a[0] = 1;
        el.cut(a, c + 0.25);  // v >= c + 1/4
        c += r / 2;
      } else {
        a[0] = -1;
        el.cut(a, -(c - 0.25));  // v <= c - 1/4
        c -= r / 2;
      }
      r /= 2;
      if (!el.feasible()) break;
      ASSERT_NEAR(el.center()[0], c, 1e-9 * (V + 1));
      ASSERT_NEAR(std::sqrt(el.shape()(0, 0)), r, 1e-9 * (V + 1));
    }
  }
}

TEST(Ellipsoid, DeterminantRatioIdentity) {
  EXPECT_DOUBLE_EQ(Ellipsoid::expected_det_ratio(1), 0.25);
  for (int m = 2; m <= 8; ++m) {
    const double md = m;
    const double closed = std::pow(md * md / (md * md - 1), md) * (md - 1) / (md + 1);
    EXPECT_NEAR(Ellipsoid::expected_det_ratio(m), closed, 1e-15);
    EXPECT_LT(closed, 1.0);
  }
  SplitMix64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = rng.between(1, 6);
    Ellipsoid el(m, 100);
    for (int step = 0; step < 30 && el.feasible(); ++step) {
      VectorXd a = VectorXd::Zero(m);
      a[rng.below(m)] = rng.bernoulli(0.5) ? 1 : -1;
      const double det_before = el.shape().determinant();
      el.cut(a, a.dot(el.center()) + 0.1);
      if (!el.feasible()) break;
      const double ratio = el.shape().determinant() / det_before;
      ASSERT_NEAR(ratio, Ellipsoid::expected_det_ratio(m), 1e-9);
      ASSERT_NEAR(el.last_det_ratio(), Ellipsoid::expected_det_ratio(m), 1e-9);
    }
  }
}

// Cuts implied by a hidden integer point, relaxed by 1/2 as the learner
// does, never exclude it or empty the ellipsoid.
TEST(Ellipsoid, ContainsHiddenPointUnderConsistentCuts) {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = rng.between(1, 5), V = rng.between(2, 64);
    VectorXd v(m);
    for (int k = 0; k < m; ++k) v[k] = rng.between(0, V);
    Ellipsoid el(m, V);
    for (int step = 0; step < 200 && el.feasible(); ++step) {
      VectorXd a = VectorXd::Zero(m);
      const int j = rng.below(m);
      const int k = rng.below(m);
      a[j] = 1;
      if (k != j) a[k] -= 1;
      const double b = a.dot(v) - 0.5;
      if (a.dot(el.center()) > b) continue;
      el.cut(a, b);
      ASSERT_TRUE(el.feasible()) << "consistent cuts made the ellipsoid infeasible";
      ASSERT_TRUE(el.contains(v)) << "trial " << trial << " step " << step;
    }
  }
}

TEST(Ellipsoid, RejectsBadCuts) {
  Ellipsoid el(2, 10);
  EXPECT_THROW(el.cut(VectorXd::Zero(2), 1.0), InputError);
  EXPECT_THROW(el.cut(VectorXd::Ones(3), 100.0), InputError);
  VectorXd a(2);
  a << 1, 0;
  EXPECT_THROW(el.cut(a, 4.5), ContractError);  // center is (5, 5)
  EXPECT_THROW(el.cut(a, 0.0), ContractError);
  EXPECT_NO_THROW(el.cut(a, 5.0));
  EXPECT_EQ(el.cuts(), 1);
}

TEST(Ellipsoid, ContradictionTurnsInfeasibleWithinCap) {
  for (int m : {1, 2, 3}) {
    Ellipsoid el(m, 16);
    VectorXd a = VectorXd::Zero(m);
    a[0] = 1;
    int cuts = 0;
    // x0 >= 9 and x0 <= 8 cannot both hold.
    while (el.feasible()) {
      if (el.center()[0] < 9) {
        el.cut(a, 9);
      } else {
        el.cut(-a, -8);
      }
      ++cuts;
      ASSERT_LE(cuts, el.cap() + 1);
    }
    EXPECT_FALSE(el.feasible());
  }
}

// ---- unit-demand variable learner ---------------------------------------------------

TEST(UnitVariableLearner, SingleBuyerSingleItemConverges) {
  Scenario s;
  s.n = 1;
  s.m = 1;
  s.value_cap = 8;
  s.true_order = {0};
  s.valuation_class = ValuationClass::kUnitDemand;
  s.valuations = {UnitDemand{{5}}};
  s.price_mode = PriceMode::kVariable;
  UnitVariableLearner l(1, 1, 8);
  int total = 0;
  for (int pass = 0; pass < 20; ++pass) {
    int mistakes = 0;
    for (int p = 0; p <= 8; ++p) {
      const Round r = priced({0}, {p});
      const Observation truth = observe(allocate(s, r), ObservationKind::kAllocation);
      mistakes += l.predict(r) != truth;
      l.update(r, truth);
    }
    total += mistakes;
    if (mistakes == 0) break;
  }
  for (int p = 0; p <= 8; ++p) {
    const Round r = priced({0}, {p});
    EXPECT_EQ(l.predict(r), observe(allocate(s, r), ObservationKind::kAllocation));
  }
  EXPECT_LE(total, Ellipsoid::cut_cap(1, 8));
  EXPECT_LE(l.ellipsoid(0).cuts(), Ellipsoid::cut_cap(1, 8));
}

TEST(UnitVariableLearner, PricesAtCapMakeNoCuts) {
  UnitVariableLearner l(3, 2, 10);
  for (int t = 0; t < 5; ++t) {
    const Round r = priced({0, 1, 2}, {10, 10});
    EXPECT_EQ(l.predict(r), Observation(empty_allocation(3)));
    EXPECT_TRUE(l.update(r, empty_allocation(3)).empty());
  }
  for (BuyerId i = 0; i < 3; ++i) EXPECT_EQ(l.ellipsoid(i).cuts(), 0);
}

TEST(UnitVariableLearner, ContendingBuyersEndInDemotion) {
  Scenario s;
  s.n = 2;
  s.m = 1;
  s.value_cap = 8;
  s.true_order = {1, 0};
  s.valuation_class = ValuationClass::kUnitDemand;
  s.valuations = {UnitDemand{{3}}, UnitDemand{{6}}};
  s.price_mode = PriceMode::kVariable;
  UnitVariableLearner l(2, 1, 8);  // tiebreak puts buyer 0 first
  const std::vector<Round> rounds{priced({0, 1}, {2}), priced({0}, {2})};
  bool demoted = false;
  for (int t = 0; t < 2000 && !demoted; ++t) {
    const Round& r = rounds[t % 2];
    demoted = has_kind(l.update(r, observe(allocate(s, r), ObservationKind::kAllocation)),
                       Kind::kDemoted);
  }
  ASSERT_TRUE(demoted);
  EXPECT_EQ(l.level_order()->current_perm(), (std::vector<BuyerId>{1, 0}));
  // The correct order only needs buyer 0's value relearned.
  int late = 0;
  for (int t = 0; t < 400; ++t) {
    const Round& r = rounds[t % 2];
    const Observation truth = observe(allocate(s, r), ObservationKind::kAllocation);
    late += l.predict(r) != truth;
    l.update(r, truth);
  }
  for (const Round& r : rounds) {
    EXPECT_EQ(l.predict(r), observe(allocate(s, r), ObservationKind::kAllocation));
  }
  EXPECT_LE(late, Ellipsoid::cut_cap(1, 8));
}

// ---- bounds with instrumentation ------------------------------------------------------

TEST(PricedLearnerProperties, AdditiveVariableSoundAndBounded) {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const Scenario s = mltest::random_scenario_for(LearnerKind::kAdditiveVariable, rng,
                                                   {1, 4, 1, 4, 256});
    auto learner = make_learner(LearnerKind::kAdditiveVariable, s, rng());
    mltest::SoundnessMonitor monitor(s, LearnerKind::kAdditiveVariable);
    const RunResult res = run_trace(s, *learner, random_rounds(s, 800, rng()), monitor.hooks());
    ASSERT_TRUE(res.summary.diagnostic.empty()) << res.summary.diagnostic;
    ASSERT_TRUE(monitor.ok()) << monitor.failures().front();
    EXPECT_LE(res.summary.total_mistakes,
              bound_value(BoundFormula::kAdditiveVariable, s.n, s.m, s.value_cap));
  }
}

TEST(PricedLearnerProperties, UnitVariableSoundAndBounded) {
  SplitMix64 rng(32);
  for (int trial = 0; trial < 15; ++trial) {
    const Scenario s = mltest::random_scenario_for(LearnerKind::kUnitVariable, rng,
                                                   {1, 3, 1, 3, 32});
    auto learner = make_learner(LearnerKind::kUnitVariable, s, rng());
    mltest::SoundnessMonitor monitor(s, LearnerKind::kUnitVariable);
    const RunResult res = run_trace(s, *learner, random_rounds(s, 800, rng()), monitor.hooks());
    ASSERT_TRUE(res.summary.diagnostic.empty()) << res.summary.diagnostic;
    ASSERT_TRUE(monitor.ok()) << monitor.failures().front();
    EXPECT_LE(monitor.worst_det_error(), 1e-9);
    EXPECT_LE(res.summary.total_mistakes,
              bound_value(BoundFormula::kUnitVariable, s.n, s.m, s.value_cap));
  }
}

}  // namespace
