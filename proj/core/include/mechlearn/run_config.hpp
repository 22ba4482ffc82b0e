#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "mechlearn/adversaries.hpp"
#include "mechlearn/harness.hpp"

namespace mechlearn {

struct AdversarySpec {
  std::string kind;  // "mergesort", "pairs" or "dummy"
  int n = 0;
  int m = 0;
};

// JSON form:
// {
//   "learner": "winners",
//   "scenario": "path.json" | {scenario object},
//   "generator": {"n", "m", "V", "valuation_class", "price_mode",
//                 "observation_kind", "min_demand", "max_demand",
//                 "value_density", "positive_values"},
//   "adversary": {"kind", "n", "m"},
//   "rounds": 1000, "seed": 1, "arrival_prob": 0.5,
//   "clean_passes": 1, "max_passes": 0, "formula": "2n^2",
//   "sampler": {"mode": "auto" | "exact" | "mcmc", "budget", "steps"},
//   "out": "prefix"
// }
// Exactly one of scenario, generator and adversary is used; a scenario wins
// over a generator.
struct RunConfig {
  std::optional<LearnerKind> learner;
  std::optional<std::string> scenario_path;
  std::optional<Scenario> scenario;
  std::optional<GeneratorParams> generator;
  std::optional<AdversarySpec> adversary;
  long rounds = 1000;
  std::uint64_t seed = 1;
  double arrival_prob = 0.5;
  int clean_passes = 1;
  int max_passes = 0;
  std::optional<BoundFormula> formula;
  SamplerOptions sampler;
  std::string out;
};

// Throws InputError on malformed input.
RunConfig parse_run_config(std::string_view json_text);
std::string run_config_to_json(const RunConfig& config, int indent = 2);

// The scenario named by the config: inline, loaded from its path (relative
// to base_dir), or generated from the generator params with `seed`.
Scenario resolve_scenario(const RunConfig& config, const std::string& base_dir = {});

std::unique_ptr<Adversary> make_adversary(const AdversarySpec& spec, std::uint64_t seed);

}  // namespace mechlearn
