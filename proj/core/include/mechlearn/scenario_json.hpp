#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "mechlearn/types.hpp"

namespace mechlearn {

// Scenario <-> JSON. The object carries
//   n, m, V, order, valuation_class, valuations, observation_kind, price_mode
// where valuations is an array of value arrays (additive, unit_demand) or of
// {"demand_set": [...], "value": v} objects (single_minded).
std::string scenario_to_json(const Scenario& scenario, int indent = 2);

// Throws InputError on malformed JSON, unknown enum names, or a scenario
// that fails validate_scenario.
Scenario scenario_from_json(std::string_view text);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

ValuationClass parse_valuation_class(std::string_view name);
PriceMode parse_price_mode(std::string_view name);
ObservationKind parse_observation_kind(std::string_view name);

}  // namespace mechlearn
