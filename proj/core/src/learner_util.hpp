#pragma once

#include <string>
#include <variant>

#include "mechlearn/learner.hpp"
#include "mechlearn/types.hpp"

namespace mechlearn::internal {

inline void check_arrival(const Round& round, int n) {
  const BuyerSet& s = round.arrival;
  if (s.empty()) throw InputError("round has no arrivals");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0 || s[i] >= n) throw InputError("arrival buyer out of range");
    if (i > 0 && s[i - 1] >= s[i]) {
      throw InputError("arrival set must be sorted and duplicate-free");
    }
  }
}

inline const std::vector<int>& check_prices(const Round& round, int m) {
  if (!round.prices || static_cast<int>(round.prices->size()) != m) {
    throw InputError("variable-price learner needs a price vector of length " +
                     std::to_string(m));
  }
  return *round.prices;
}

// Allocation over n buyers whose bundles use items in [0, m) and are empty
// for buyers outside the arrival set.
inline const Allocation& expect_allocation(const Observation& obs,
                                           const Round& round, int n, int m) {
  const auto* a = std::get_if<Allocation>(&obs);
  if (!a) throw InputError("expected an allocation observation");
  if (static_cast<int>(a->bundles.size()) != n) {
    throw InputError("allocation must list one bundle per buyer");
  }
  for (int b = 0; b < n; ++b) {
    const ItemSet& x = a->bundles[b];
    if (!x.empty() && !contains(round.arrival, b)) {
      throw InputError("allocation gives items to a buyer that did not arrive");
    }
    for (ItemId e : x) {
      if (e < 0 || e >= m) throw InputError("allocated item out of range");
    }
  }
  return *a;
}

inline const BuyerSet& expect_winners(const Observation& obs, const Round& round) {
  const auto* w = std::get_if<WinnerSet>(&obs);
  if (!w) throw InputError("expected a winner-set observation");
  if (!is_subset(w->winners, round.arrival)) {
    throw InputError("winner set is not a subset of the arrivals");
  }
  return w->winners;
}

inline LearnerEvent event(LearnerEvent::Kind kind, int buyer) {
  LearnerEvent e;
  e.kind = kind;
  e.buyer = buyer;
  return e;
}

}  // namespace mechlearn::internal
