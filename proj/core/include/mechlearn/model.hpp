#pragma once

#include <string>
#include <vector>

#include "mechlearn/types.hpp"

namespace mechlearn {

// Runs the ground-truth ordered-arrival mechanism on one round.
//
// Buyers in the arrival set are served by the scenario's true priority.
// Each takes the utility-maximising bundle from what is left:
//   single-minded: its demand set if entirely available, otherwise nothing
//                  (prices are ignored);
//   additive:      every remaining item with value > price;
//   unit-demand:   the remaining item maximising value - price if that
//                  maximum is positive, ties to the lowest ItemId.
// Fixed-price scenarios use price 0 for every item.
//
// Throws InputError if the round does not fit the scenario.
Allocation allocate(const Scenario& scenario, const Round& round);

// Identity for kAllocation, winner indicator set for kWinnerSet.
Observation observe(const Allocation& allocation, ObservationKind kind);

// Every invariant violation found, empty when the scenario is well formed.
std::vector<std::string> validate_scenario(const Scenario& scenario);

// Throws InputError describing the first problem with `round`.
void validate_round(const Scenario& scenario, const Round& round);

// rank[i] = 1-based position of buyer i in the scenario's true order.
std::vector<int> true_ranks(const Scenario& scenario);

// Effective price vector for a round: the round's prices in variable mode,
// zeros in fixed mode.
std::vector<int> effective_prices(const Scenario& scenario, const Round& round);

// All-empty allocation over n buyers.
Allocation empty_allocation(int n);

}  // namespace mechlearn
