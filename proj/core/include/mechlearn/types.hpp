#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace mechlearn {

// Zero-based indices. A BuyerId lives in [0, n), an ItemId in [0, m).
using BuyerId = int;
using ItemId = int;

// Sets are kept as sorted, duplicate-free vectors so that equality and
// printing are canonical.
using ItemSet = std::vector<ItemId>;
using BuyerSet = std::vector<BuyerId>;

// Malformed input supplied by a caller (bad ids, wrong lengths, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A caller broke an algorithmic contract. These indicate bugs, never
// recoverable conditions.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A request exceeded a documented size guard.
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ValuationClass { kSingleMinded, kAdditive, kUnitDemand };
enum class PriceMode { kFixed, kVariable };
enum class ObservationKind { kAllocation, kWinnerSet };

struct SingleMinded {
  ItemSet demand_set;
  int value = 1;
  bool operator==(const SingleMinded&) const = default;
};

struct Additive {
  std::vector<int> values;
  bool operator==(const Additive&) const = default;
};

struct UnitDemand {
  std::vector<int> values;
  bool operator==(const UnitDemand&) const = default;
};

using Valuation = std::variant<SingleMinded, Additive, UnitDemand>;

// Ground truth for one ordered-arrival mechanism.
struct Scenario {
  int n = 0;
  int m = 0;
  int value_cap = 1;
  // true_order[0] has the highest priority.
  std::vector<BuyerId> true_order;
  ValuationClass valuation_class = ValuationClass::kSingleMinded;
  std::vector<Valuation> valuations;
  PriceMode price_mode = PriceMode::kFixed;
  ObservationKind observation_kind = ObservationKind::kAllocation;

  bool operator==(const Scenario&) const = default;
};

struct Round {
  BuyerSet arrival;
  // Present iff the scenario runs in variable-price mode.
  std::optional<std::vector<int>> prices;

  bool operator==(const Round&) const = default;
};

// bundles[i] is the set buyer i received; empty for buyers that did not
// arrive or bought nothing.
struct Allocation {
  std::vector<ItemSet> bundles;

  bool operator==(const Allocation&) const = default;
};

struct WinnerSet {
  BuyerSet winners;

  bool operator==(const WinnerSet&) const = default;
};

using Observation = std::variant<Allocation, WinnerSet>;

// Set helpers over sorted vectors.
template <typename T>
void normalize(std::vector<T>& s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
}

template <typename T>
bool contains(const std::vector<T>& s, const T& x) {
  return std::binary_search(s.begin(), s.end(), x);
}

template <typename T>
bool is_subset(const std::vector<T>& a, const std::vector<T>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

template <typename T>
bool intersects(const std::vector<T>& a, const std::vector<T>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      return true;
    }
  }
  return false;
}

template <typename T>
std::vector<T> set_minus(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<T> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

const char* to_string(ValuationClass c);
const char* to_string(PriceMode p);
const char* to_string(ObservationKind k);

}  // namespace mechlearn
