#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mechlearn/learner.hpp"
#include "mechlearn/level_order.hpp"
#include "mechlearn/linext.hpp"
#include "mechlearn/rng.hpp"

namespace mechlearn {

// Symmetric conflict relation, initially complete. Edges are only deleted.
class ConflictGraph {
 public:
  explicit ConflictGraph(int n = 0);

  int size() const { return n_; }
  bool has_edge(int a, int b) const;
  // Returns false if the edge was already gone.
  bool remove_edge(int a, int b);
  int edge_count() const { return edges_; }

 private:
  int n_ = 0;
  int edges_ = 0;
  std::vector<std::uint8_t> adj_;
};

// Priority-ordered greedy winner prediction over generic ids (buyers, or
// ghost buyers for the unit-demand reduction).
//
// Predict: scan the arrivals by the level order and admit an id unless it
// has an edge to an id admitted before it. On a mistake, delete the edge of
// every co-winning pair that still has one; only if there is none, demote
// the first predicted winner that did not win.
class WinnersCore {
 public:
  struct Outcome {
    bool mistake = false;
    std::vector<std::pair<int, int>> deleted;
    std::optional<int> demoted;
  };

  WinnersCore() = default;
  explicit WinnersCore(std::vector<int> tiebreak);

  int size() const { return order_.size(); }
  const LevelOrder& order() const { return order_; }
  const ConflictGraph& graph() const { return graph_; }

  // Sorted winner set.
  std::vector<int> predict(const std::vector<int>& arrival) const;

  // `truth` must be a subset of `arrival`. Throws ContractError when the
  // update rule has nothing to act on, which a consistent environment
  // never produces.
  Outcome learn(const std::vector<int>& arrival, const std::vector<int>& truth,
                std::int64_t time = -1);

 private:
  LevelOrder order_;
  ConflictGraph graph_;
};

// Predicts the winner set of single-minded buyers.
class WinnersLearner : public OnlineLearner {
 public:
  explicit WinnersLearner(int n);
  WinnersLearner(int n, std::vector<BuyerId> tiebreak);

  std::string name() const override { return "winners"; }
  ObservationKind observation_kind() const override {
    return ObservationKind::kWinnerSet;
  }
  Observation predict(const Round& round) const override;
  std::vector<LearnerEvent> update(const Round& round,
                                   const Observation& truth) override;
  const LevelOrder* level_order() const override { return &core_.order(); }

  const WinnersCore& core() const { return core_; }

 private:
  int n_;
  WinnersCore core_;
  std::int64_t time_ = 0;
};

// Predicts full allocations of single-minded buyers. A buyer's demand set is
// learned from its first observed win; until then it is predicted to lose.
class SingleMindedAllocLearner : public OnlineLearner {
 public:
  SingleMindedAllocLearner(int n, int m);
  SingleMindedAllocLearner(int n, int m, std::vector<BuyerId> tiebreak);

  std::string name() const override { return "single_minded_alloc"; }
  ObservationKind observation_kind() const override {
    return ObservationKind::kAllocation;
  }
  Observation predict(const Round& round) const override;
  std::vector<LearnerEvent> update(const Round& round,
                                   const Observation& truth) override;
  const LevelOrder* level_order() const override { return &order_; }

  const std::optional<ItemSet>& demand(BuyerId i) const { return demand_.at(i); }

 private:
  Allocation predict_allocation(const Round& round) const;

  int n_;
  int m_;
  LevelOrder order_;
  std::vector<std::optional<ItemSet>> demand_;
  std::int64_t time_ = 0;
};

// Additive buyers at fixed prices: B[i][e] records that buyer i was seen to
// want item e; a buyer is predicted to take every remaining wanted item.
class AdditiveFixedLearner : public OnlineLearner {
 public:
  AdditiveFixedLearner(int n, int m);
  AdditiveFixedLearner(int n, int m, std::vector<BuyerId> tiebreak);

  std::string name() const override { return "additive_fixed"; }
  ObservationKind observation_kind() const override {
    return ObservationKind::kAllocation;
  }
  Observation predict(const Round& round) const override;
  std::vector<LearnerEvent> update(const Round& round,
                                   const Observation& truth) override;
  const LevelOrder* level_order() const override { return &order_; }

  bool bit(BuyerId i, ItemId e) const { return bits_.at(i * m_ + e) != 0; }

 private:
  Allocation predict_allocation(const Round& round) const;

  int n_;
  int m_;
  LevelOrder order_;
  std::vector<std::uint8_t> bits_;
  std::int64_t time_ = 0;
};

// Ghost buyer (j, k) stands for "buyer j takes item k"; id j*m + k.
class GhostIndex {
 public:
  GhostIndex(int n, int m);

  int id(BuyerId buyer, ItemId item) const;
  BuyerId buyer(int ghost) const { return ghost / m_; }
  ItemId item(int ghost) const { return ghost % m_; }
  int size() const { return n_ * m_; }

 private:
  int n_;
  int m_;
};

// Unit-demand buyers at fixed prices via the ghost reduction: each buyer
// becomes m single-minded ghosts wanting one item each, ordered by the
// buyer's preference, and a winners learner runs over the ghosts. Ghosts
// of one buyer, or of one item, never co-win, so their edges survive and
// keep predictions to one item per buyer.
class UnitDemandGhostLearner : public OnlineLearner {
 public:
  UnitDemandGhostLearner(int n, int m);
  UnitDemandGhostLearner(int n, int m, const std::vector<BuyerId>& tiebreak);

  std::string name() const override { return "unit_demand_ghost"; }
  ObservationKind observation_kind() const override {
    return ObservationKind::kAllocation;
  }
  Observation predict(const Round& round) const override;
  std::vector<LearnerEvent> update(const Round& round,
                                   const Observation& truth) override;
  // Over ghosts, not buyers.
  const LevelOrder* level_order() const override { return &core_.order(); }

  const GhostIndex& ghosts() const { return ghosts_; }
  const WinnersCore& core() const { return core_; }

 private:
  std::vector<int> ghost_arrival(const BuyerSet& arrival) const;

  int n_;
  int m_;
  GhostIndex ghosts_;
  WinnersCore core_;
  std::int64_t time_ = 0;
};

// Unit-demand buyers at fixed prices via per-buyer preference orders. Each
// buyer keeps a partial order over its m items plus a "no purchase"
// element (index m) and is predicted to take the top remaining element of
// one freshly sampled linear extension. A mistake records true ≻ predicted
// for the first mistaken buyer; a contradiction demotes that buyer and
// clears its order.
//
// predict() samples from a copy of the internal generator; update() makes
// the same draws and then advances it.
class UnitDemandPrimeLearner : public OnlineLearner {
 public:
  UnitDemandPrimeLearner(int n, int m, std::uint64_t seed,
                         SamplerOptions options = {});
  UnitDemandPrimeLearner(int n, int m, std::vector<BuyerId> tiebreak,
                         std::uint64_t seed, SamplerOptions options = {});

  std::string name() const override { return "unit_demand_prime"; }
  ObservationKind observation_kind() const override {
    return ObservationKind::kAllocation;
  }
  Observation predict(const Round& round) const override;
  std::vector<LearnerEvent> update(const Round& round,
                                   const Observation& truth) override;
  const LevelOrder* level_order() const override { return &order_; }

  const PartialOrder& preferences(BuyerId i) const { return prefs_.at(i); }
  int none_element() const { return m_; }

 private:
  Allocation predict_with(const Round& round, SplitMix64& rng) const;
  const LinearExtensionSampler& sampler(BuyerId i) const;

  int n_;
  int m_;
  LevelOrder order_;
  std::vector<PartialOrder> prefs_;
  SamplerOptions options_;
  SplitMix64 rng_;
  mutable std::vector<std::optional<LinearExtensionSampler>> cache_;
  std::int64_t time_ = 0;
};

// Single-item priority learner (every buyer wants item 0, the first
// arrival under the hidden order wins) over winner-set observations.
class SingleItemLearner : public OnlineLearner {
 public:
  SingleItemLearner(int n, std::uint64_t seed, SamplerOptions options = {});

  std::string name() const override { return "single_item"; }
  ObservationKind observation_kind() const override {
    return ObservationKind::kWinnerSet;
  }
  Observation predict(const Round& round) const override;
  std::vector<LearnerEvent> update(const Round& round,
                                   const Observation& truth) override;

  const SingleItemHalving& halving() const { return halving_; }

 private:
  SingleItemHalving halving_;
  SplitMix64 rng_;
};

}  // namespace mechlearn
