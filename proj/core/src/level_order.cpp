#include "mechlearn/level_order.hpp"

#include <numeric>
#include <string>

namespace mechlearn {

DemotionOverflow::DemotionOverflow(BuyerId buyer)
    : ContractError("demotion overflow: buyer " + std::to_string(buyer) +
                    " is already at the last level"),
      buyer_(buyer) {}

LevelOrder::LevelOrder(int n) {
  if (n < 0) throw InputError("LevelOrder: negative size");
  std::vector<BuyerId> identity(n);
  std::iota(identity.begin(), identity.end(), 0);
  *this = LevelOrder(std::move(identity));
}

LevelOrder::LevelOrder(std::vector<BuyerId> tiebreak)
    : tiebreak_(std::move(tiebreak)) {
  const int n = size();
  tiebreak_rank_.assign(n, -1);
  for (int r = 0; r < n; ++r) {
    BuyerId b = tiebreak_[r];
    if (b < 0 || b >= n || tiebreak_rank_[b] != -1) {
      throw InputError("LevelOrder: tiebreak is not a permutation");
    }
    tiebreak_rank_[b] = r;
  }
  level_.assign(n, 1);
  position_.assign(n, 0);
  rebuild();
}

void LevelOrder::rebuild() {
  perm_ = tiebreak_;
  std::stable_sort(perm_.begin(), perm_.end(), [&](BuyerId a, BuyerId b) {
    return level_[a] < level_[b];
  });
  for (int pos = 0; pos < size(); ++pos) position_[perm_[pos]] = pos;
}

void LevelOrder::demote(BuyerId i, std::int64_t time) {
  if (i < 0 || i >= size()) throw InputError("demote: buyer out of range");
  if (level_[i] >= size()) throw DemotionOverflow(i);
  ++level_[i];
  log_.push_back({time, i});
  rebuild();
}

BuyerId LevelOrder::kth_in_subset(int k, const BuyerSet& subset) const {
  if (k < 1 || k > static_cast<int>(subset.size())) {
    throw InputError("kth_in_subset: k out of range");
  }
  BuyerSet ordered = order_subset(subset);
  return ordered[k - 1];
}

BuyerSet LevelOrder::order_subset(const BuyerSet& subset) const {
  BuyerSet ordered = subset;
  for (BuyerId b : ordered) {
    if (b < 0 || b >= size()) throw InputError("order_subset: buyer out of range");
  }
  std::sort(ordered.begin(), ordered.end(),
            [&](BuyerId a, BuyerId b) { return position_[a] < position_[b]; });
  return ordered;
}

std::optional<BuyerId> LevelOrder::first_mistake(const Allocation& truth,
                                                 const Allocation& predicted) const {
  for (BuyerId b : perm_) {
    const bool in_t = b < static_cast<int>(truth.bundles.size());
    const bool in_p = b < static_cast<int>(predicted.bundles.size());
    const ItemSet empty;
    const ItemSet& t = in_t ? truth.bundles[b] : empty;
    const ItemSet& p = in_p ? predicted.bundles[b] : empty;
    if (t != p) return b;
  }
  return std::nullopt;
}

}  // namespace mechlearn
