#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mechlearn/types.hpp"

namespace mechlearn {

// Raised when a buyer already at level n is demoted. Under a correct
// learner this never happens: every demotion must be justified by some
// element that is later in the estimate but earlier in the hidden order.
class DemotionOverflow : public ContractError {
 public:
  explicit DemotionOverflow(BuyerId buyer);
  BuyerId buyer() const { return buyer_; }

 private:
  BuyerId buyer_;
};

// Permutation estimate that only ever moves elements later.
//
// Each element sits on a level in [1, n]. The output permutation lists
// level 1, then level 2, ..., each level ordered by a fixed tiebreak
// permutation. Starting with everyone on level 1 and demoting only
// elements that are provably ahead of something they should follow, no
// element ever sinks below its position in the hidden order, so at most
// n^2 demotions happen before the estimate is consistent.
class LevelOrder {
 public:
  struct Demotion {
    std::int64_t time;
    BuyerId buyer;
    bool operator==(const Demotion&) const = default;
  };

  LevelOrder() = default;
  // Identity tiebreak.
  explicit LevelOrder(int n);
  // Throws InputError unless `tiebreak` is a permutation of [0, n).
  explicit LevelOrder(std::vector<BuyerId> tiebreak);

  int size() const { return static_cast<int>(tiebreak_.size()); }
  int level(BuyerId i) const { return level_.at(i); }
  const std::vector<BuyerId>& tiebreak() const { return tiebreak_; }
  const std::vector<Demotion>& demotion_log() const { return log_; }
  int total_demotions() const { return static_cast<int>(log_.size()); }

  // Moves `i` one level down. Throws DemotionOverflow at level n.
  void demote(BuyerId i, std::int64_t time = -1);

  const std::vector<BuyerId>& current_perm() const { return perm_; }

  // 1-based rank of i in current_perm().
  int position_of(BuyerId i) const { return position_.at(i) + 1; }

  // True iff a comes before b in current_perm().
  bool precedes(BuyerId a, BuyerId b) const {
    return position_[a] < position_[b];
  }

  // The k-th (1-based) member of `subset` under current_perm().
  // Throws InputError if k is outside [1, |subset|].
  BuyerId kth_in_subset(int k, const BuyerSet& subset) const;

  // `subset` listed in current_perm() order.
  BuyerSet order_subset(const BuyerSet& subset) const;

  // Earliest buyer in current_perm() whose bundles differ, if any.
  std::optional<BuyerId> first_mistake(const Allocation& truth,
                                       const Allocation& predicted) const;

 private:
  void rebuild();

  std::vector<BuyerId> tiebreak_;
  std::vector<int> tiebreak_rank_;
  std::vector<int> level_;
  std::vector<BuyerId> perm_;
  std::vector<int> position_;
  std::vector<Demotion> log_;
};

}  // namespace mechlearn
