#include "mechlearn/model.hpp"

#include <sstream>

namespace mechlearn {

const char* to_string(ValuationClass c) {
  switch (c) {
    case ValuationClass::kSingleMinded:
      return "single_minded";
    case ValuationClass::kAdditive:
      return "additive";
    case ValuationClass::kUnitDemand:
      return "unit_demand";
  }
  return "?";
}

const char* to_string(PriceMode p) {
  return p == PriceMode::kFixed ? "fixed" : "variable";
}

const char* to_string(ObservationKind k) {
  return k == ObservationKind::kAllocation ? "allocation" : "winner_set";
}

namespace {

ValuationClass class_of(const Valuation& v) {
  if (std::holds_alternative<SingleMinded>(v)) return ValuationClass::kSingleMinded;
  if (std::holds_alternative<Additive>(v)) return ValuationClass::kAdditive;
  return ValuationClass::kUnitDemand;
}

template <typename... Args>
std::string cat(const Args&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

void check_values(const std::vector<int>& values, int buyer,
                  const Scenario& s, std::vector<std::string>& out) {
  if (static_cast<int>(values.size()) != s.m) {
    out.push_back(cat("buyer ", buyer, ": expected ", s.m, " values, got ",
                      values.size()));
  }
  for (int v : values) {
    if (v < 0) {
      out.push_back(cat("buyer ", buyer, ": negative value ", v));
    } else if (v > s.value_cap) {
      out.push_back(cat("buyer ", buyer, ": value exceeds cap (", v, " > ",
                        s.value_cap, ")"));
    }
  }
}

}  // namespace

std::vector<std::string> validate_scenario(const Scenario& s) {
  std::vector<std::string> out;
  if (s.n < 1) out.push_back("n must be positive");
  if (s.m < 1) out.push_back("m must be positive");
  if (s.value_cap < 1) out.push_back("value cap V must be at least 1");

  if (static_cast<int>(s.true_order.size()) != s.n) {
    out.push_back(cat("true_order has length ", s.true_order.size(),
                      ", expected ", s.n));
  }
  {
    std::vector<int> seen(std::max(s.n, 0), 0);
    bool perm = true;
    for (BuyerId b : s.true_order) {
      if (b < 0 || b >= s.n || seen[b]++) perm = false;
    }
    if (!perm) out.push_back("true_order is not a permutation");
  }

  if (static_cast<int>(s.valuations.size()) != s.n) {
    out.push_back(cat("expected ", s.n, " valuations, got ",
                      s.valuations.size()));
  }
  for (int i = 0; i < static_cast<int>(s.valuations.size()); ++i) {
    const Valuation& v = s.valuations[i];
    if (class_of(v) != s.valuation_class) {
      out.push_back(cat("buyer ", i, ": valuation class differs from ",
                        to_string(s.valuation_class)));
    }
    if (const auto* sm = std::get_if<SingleMinded>(&v)) {
      if (sm->demand_set.empty()) {
        out.push_back(cat("buyer ", i, ": empty demand set"));
      }
      ItemSet sorted = sm->demand_set;
      normalize(sorted);
      if (sorted != sm->demand_set) {
        out.push_back(cat("buyer ", i, ": demand set not sorted and unique"));
      }
      for (ItemId j : sm->demand_set) {
        if (j < 0 || j >= s.m) {
          out.push_back(cat("buyer ", i, ": demand item ", j, " out of range"));
        }
      }
      if (sm->value <= 0) {
        out.push_back(cat("buyer ", i, ": single-minded value must be positive"));
      } else if (sm->value > s.value_cap) {
        out.push_back(cat("buyer ", i, ": value exceeds cap (", sm->value,
                          " > ", s.value_cap, ")"));
      }
    } else if (const auto* add = std::get_if<Additive>(&v)) {
      check_values(add->values, i, s, out);
    } else {
      check_values(std::get<UnitDemand>(v).values, i, s, out);
    }
  }
  return out;
}

void validate_round(const Scenario& s, const Round& round) {
  if (round.arrival.empty()) throw InputError("arrival set is empty");
  for (std::size_t k = 0; k < round.arrival.size(); ++k) {
    BuyerId b = round.arrival[k];
    if (b < 0 || b >= s.n) {
      throw InputError(cat("arrival buyer ", b, " out of range [0, ", s.n, ")"));
    }
    if (k > 0 && round.arrival[k - 1] >= b) {
      throw InputError("arrival set must be sorted and duplicate-free");
    }
  }
  if (s.price_mode == PriceMode::kVariable) {
    if (!round.prices) throw InputError("variable-price round without prices");
    if (static_cast<int>(round.prices->size()) != s.m) {
      throw InputError(cat("price vector has length ", round.prices->size(),
                           ", expected ", s.m));
    }
    for (int p : *round.prices) {
      if (p < 0 || p > s.value_cap) {
        throw InputError(cat("price ", p, " outside [0, ", s.value_cap, "]"));
      }
    }
  } else if (round.prices) {
    throw InputError("fixed-price scenario given a price vector");
  }
}

std::vector<int> true_ranks(const Scenario& s) {
  std::vector<int> rank(s.n, 0);
  for (int pos = 0; pos < static_cast<int>(s.true_order.size()); ++pos) {
    rank[s.true_order[pos]] = pos + 1;
  }
  return rank;
}

std::vector<int> effective_prices(const Scenario& s, const Round& round) {
  if (s.price_mode == PriceMode::kVariable && round.prices) return *round.prices;
  return std::vector<int>(s.m, 0);
}

Allocation empty_allocation(int n) { return Allocation{std::vector<ItemSet>(n)}; }

Allocation allocate(const Scenario& s, const Round& round) {
  validate_round(s, round);
  const std::vector<int> prices = effective_prices(s, round);
  std::vector<char> taken(s.m, 0);
  std::vector<char> present(s.n, 0);
  for (BuyerId b : round.arrival) present[b] = 1;

  Allocation out = empty_allocation(s.n);
  for (BuyerId i : s.true_order) {
    if (!present[i]) continue;
    ItemSet& bundle = out.bundles[i];
    const Valuation& val = s.valuations[i];
    if (const auto* sm = std::get_if<SingleMinded>(&val)) {
      bool available = std::none_of(sm->demand_set.begin(), sm->demand_set.end(),
                                    [&](ItemId j) { return taken[j]; });
      if (available) bundle = sm->demand_set;
    } else if (const auto* add = std::get_if<Additive>(&val)) {
      for (ItemId j = 0; j < s.m; ++j) {
        if (!taken[j] && add->values[j] > prices[j]) bundle.push_back(j);
      }
    } else {
      const auto& values = std::get<UnitDemand>(val).values;
      int best = -1;
      int best_utility = 0;
      for (ItemId j = 0; j < s.m; ++j) {
        if (taken[j]) continue;
        int u = values[j] - prices[j];
        if (u > best_utility) {
          best = j;
          best_utility = u;
        }
      }
      if (best >= 0) bundle.push_back(best);
    }
    for (ItemId j : bundle) taken[j] = 1;
  }
  return out;
}

Observation observe(const Allocation& allocation, ObservationKind kind) {
  if (kind == ObservationKind::kAllocation) return allocation;
  WinnerSet w;
  for (int i = 0; i < static_cast<int>(allocation.bundles.size()); ++i) {
    if (!allocation.bundles[i].empty()) w.winners.push_back(i);
  }
  return w;
}

}  // namespace mechlearn
