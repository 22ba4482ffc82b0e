#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mechlearn/rng.hpp"
#include "mechlearn/types.hpp"

namespace mechlearn {

struct GeneratorParams {
  int n = 4;
  int m = 3;
  int value_cap = 10;
  ValuationClass valuation_class = ValuationClass::kSingleMinded;
  PriceMode price_mode = PriceMode::kFixed;
  ObservationKind observation_kind = ObservationKind::kAllocation;
  // Single-minded demand size range; max_demand = 0 means m.
  int min_demand = 1;
  int max_demand = 0;
  // Additive / unit-demand: probability that a value is positive.
  double value_density = 0.7;
  // Unit-demand: draw every value from [1, V] (the ghost reduction needs it).
  bool positive_values = false;
};

// Throws InputError for unsatisfiable parameters.
void validate_params(const GeneratorParams& params);

// Uniform random priority order and random valuations within the caps.
// Deterministic in (seed, params).
Scenario gen_random_scenario(std::uint64_t seed, const GeneratorParams& params);

// True when some arriving unit-demand buyer has two items with the same
// positive utility value - price.
bool has_utility_tie(const Scenario& scenario, const Round& round);

// Each buyer arrives independently with probability arrival_prob (redrawn
// while empty). Variable-price rounds get uniform prices in [0, V], redrawn
// until tie free for unit-demand scenarios.
Round gen_random_round(const Scenario& scenario, SplitMix64& rng,
                       double arrival_prob = 0.5);

// Bottom-up merge sort driven by external comparison answers. Runs start
// as singletons and are merged pairwise, level by level; each query
// compares the heads of the two runs being merged. Heads of different runs
// are never related by earlier answers, so either answer stays consistent.
class MergeSortSchedule {
 public:
  MergeSortSchedule() = default;
  explicit MergeSortSchedule(std::vector<int> elements);

  bool done() const;
  // Current pair (head of the left run, head of the right run).
  std::pair<int, int> query() const;
  // `first` must be one of the queried pair; it is placed ahead of the other.
  void answer(int first);
  int comparisons() const { return comparisons_; }

  // A total order consistent with every answer so far; the sorted order
  // once done().
  std::vector<int> order() const;

 private:
  void settle();

  std::vector<std::vector<int>> runs_;    // current level
  std::vector<std::vector<int>> merged_;  // finished runs of the next level
  std::size_t next_ = 0;                  // index of the left run being merged
  std::vector<int> out_;
  std::size_t left_pos_ = 0;
  std::size_t right_pos_ = 0;
  int comparisons_ = 0;
};

// Adaptive environment that answers the learner's predictions.
class Adversary {
 public:
  struct Record {
    Round round;
    Observation prediction;
    Observation declared;
    bool counted = true;  // false for warm-up rounds
  };

  virtual ~Adversary() = default;

  virtual std::string name() const = 0;
  virtual ObservationKind observation_kind() const = 0;
  virtual bool done() const = 0;
  virtual Round next_round() const = 0;
  // Declared truth for next_round() given the learner's prediction.
  virtual Observation respond(const Observation& prediction) = 0;
  // A scenario whose mechanism reproduces every declared answer.
  virtual Scenario extract_consistent_scenario() const = 0;

  const std::vector<Record>& history() const { return history_; }
  // Counted rounds whose declared truth differs from the prediction.
  int forced_mistakes() const;

 protected:
  std::vector<Record> history_;
};

// Single-item priority setting (one item, every buyer wants it; winner-set
// observations). Presents merge-sort pairs and declares the learner's
// predicted winner the loser.
class MergeSortAdversary : public Adversary {
 public:
  MergeSortAdversary(int n, std::uint64_t seed);

  std::string name() const override { return "mergesort"; }
  ObservationKind observation_kind() const override {
    return ObservationKind::kWinnerSet;
  }
  bool done() const override { return schedule_.done(); }
  Round next_round() const override;
  Observation respond(const Observation& prediction) override;
  Scenario extract_consistent_scenario() const override;

  int n() const { return n_; }

 private:
  int n_;
  MergeSortSchedule schedule_;
};

// Single-minded winners setting. Presents every buyer pair {i, j}, i < j,
// once, with priority i before j: a predicted double win is answered as a
// conflict (only i wins), a predicted single win as no conflict.
class PairsAdversary : public Adversary {
 public:
  explicit PairsAdversary(int n);

  std::string name() const override { return "pairs"; }
  ObservationKind observation_kind() const override {
    return ObservationKind::kWinnerSet;
  }
  bool done() const override { return next_ >= pairs_.size(); }
  Round next_round() const override;
  Observation respond(const Observation& prediction) override;
  // One shared item per conflicting pair, a private item for buyers with no
  // conflict, identity priority.
  Scenario extract_consistent_scenario() const override;

  const std::vector<std::pair<int, int>>& conflicts() const { return conflicts_; }

 private:
  int n_;
  std::vector<std::pair<int, int>> pairs_;
  std::vector<std::pair<int, int>> conflicts_;
  std::size_t next_ = 0;
};

// Unit-demand fixed-price setting with n > m >= 2. Buyers 0..m-1 are
// dummies, dummy d taking item d. After a warm-up that presents each dummy
// alone until the learner predicts it correctly three times in a row (at
// most 64 rounds each), every true buyer is sorted by merge sort over the
// items: a query brings in m-2 dummies plus the buyer, leaving exactly the
// two compared items, and the learner's pick is declared the worse one.
class DummyBuyerAdversary : public Adversary {
 public:
  static constexpr int kWarmupStreak = 3;
  static constexpr int kWarmupCap = 64;

  DummyBuyerAdversary(int n, int m, std::uint64_t seed);

  std::string name() const override { return "dummy"; }
  ObservationKind observation_kind() const override {
    return ObservationKind::kAllocation;
  }
  bool done() const override;
  Round next_round() const override;
  Observation respond(const Observation& prediction) override;
  // V = m; dummies value their favourite at V and all else at 0; true
  // buyers value items V, V-1, ..., 1 in their sorted order; dummies have
  // priority over true buyers.
  Scenario extract_consistent_scenario() const override;

  int n() const { return n_; }
  int m() const { return m_; }

 private:
  Allocation dummy_allocation(const BuyerSet& arrival) const;

  int n_;
  int m_;
  // Warm-up state.
  int warm_dummy_ = 0;
  int streak_ = 0;
  int warm_rounds_ = 0;
  // Sorting state, one schedule per true buyer.
  int current_ = 0;
  std::vector<MergeSortSchedule> schedules_;
};

}  // namespace mechlearn
