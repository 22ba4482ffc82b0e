#include "mechlearn/run_config.hpp"

#include <filesystem>

#include "json.hpp"
#include "mechlearn/scenario_json.hpp"

namespace mechlearn {

using nlohmann::json;

namespace {

const char* mode_name(SamplerOptions::Mode mode) {
  switch (mode) {
    case SamplerOptions::Mode::kExact: return "exact";
    case SamplerOptions::Mode::kMcmc: return "mcmc";
    case SamplerOptions::Mode::kAuto: return "auto";
  }
  return "auto";
}

SamplerOptions::Mode parse_mode(const std::string& name) {
  if (name == "exact") return SamplerOptions::Mode::kExact;
  if (name == "mcmc") return SamplerOptions::Mode::kMcmc;
  if (name == "auto") return SamplerOptions::Mode::kAuto;
  throw InputError("unknown sampler mode '" + name + "'");
}

GeneratorParams parse_generator(const json& j) {
  GeneratorParams g;
  g.n = j.value("n", g.n);
  g.m = j.value("m", g.m);
  g.value_cap = j.value("V", g.value_cap);
  if (j.contains("valuation_class")) {
    g.valuation_class = parse_valuation_class(j["valuation_class"].get<std::string>());
  }
  if (j.contains("price_mode")) g.price_mode = parse_price_mode(j["price_mode"].get<std::string>());
  if (j.contains("observation_kind")) {
    g.observation_kind = parse_observation_kind(j["observation_kind"].get<std::string>());
  }
  g.min_demand = j.value("min_demand", g.min_demand);
  g.max_demand = j.value("max_demand", g.max_demand);
  g.value_density = j.value("value_density", g.value_density);
  g.positive_values = j.value("positive_values", g.positive_values);
  validate_params(g);
  return g;
}

json generator_json(const GeneratorParams& g) {
  return {{"n", g.n},
          {"m", g.m},
          {"V", g.value_cap},
          {"valuation_class", to_string(g.valuation_class)},
          {"price_mode", to_string(g.price_mode)},
          {"observation_kind", to_string(g.observation_kind)},
          {"min_demand", g.min_demand},
          {"max_demand", g.max_demand},
          {"value_density", g.value_density},
          {"positive_values", g.positive_values}};
}

}  // namespace

RunConfig parse_run_config(std::string_view text) {
  RunConfig c;
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw InputError("run config must be a JSON object");
    if (j.contains("learner")) c.learner = parse_learner_kind(j["learner"].get<std::string>());
    if (j.contains("scenario")) {
      const json& s = j["scenario"];
      if (s.is_string()) {
        c.scenario_path = s.get<std::string>();
      } else {
        c.scenario = scenario_from_json(s.dump());
      }
    }
    if (j.contains("generator")) c.generator = parse_generator(j["generator"]);
    if (j.contains("adversary")) {
      const json& a = j["adversary"];
      c.adversary = AdversarySpec{a.at("kind").get<std::string>(), a.value("n", 0),
                                  a.value("m", 0)};
      const std::string& kind = c.adversary->kind;
      if (kind != "mergesort" && kind != "pairs" && kind != "dummy") {
        throw InputError("unknown adversary '" + kind + "'");
      }
    }
    c.rounds = j.value("rounds", c.rounds);
    c.seed = j.value("seed", c.seed);
    c.arrival_prob = j.value("arrival_prob", c.arrival_prob);
    c.clean_passes = j.value("clean_passes", c.clean_passes);
    c.max_passes = j.value("max_passes", c.max_passes);
    if (j.contains("formula")) c.formula = parse_bound_formula(j["formula"].get<std::string>());
    if (j.contains("sampler")) {
      const json& s = j["sampler"];
      if (s.contains("mode")) c.sampler.mode = parse_mode(s["mode"].get<std::string>());
      c.sampler.downset_budget = s.value("budget", c.sampler.downset_budget);
      c.sampler.mcmc_steps = s.value("steps", c.sampler.mcmc_steps);
    }
    c.out = j.value("out", std::string{});
  } catch (const json::exception& e) {
    throw InputError(std::string("run config: ") + e.what());
  }
  if (c.rounds < 0) throw InputError("run config: rounds must be >= 0");
  if (!(c.arrival_prob > 0.0 && c.arrival_prob <= 1.0)) {
    throw InputError("run config: arrival_prob must lie in (0, 1]");
  }
  if (c.clean_passes < 1) throw InputError("run config: clean_passes must be >= 1");
  return c;
}

std::string run_config_to_json(const RunConfig& c, int indent) {
  json j;
  if (c.learner) j["learner"] = to_string(*c.learner);
  if (c.scenario) {
    j["scenario"] = json::parse(scenario_to_json(*c.scenario));
  } else if (c.scenario_path) {
    j["scenario"] = *c.scenario_path;
  }
  if (c.generator) j["generator"] = generator_json(*c.generator);
  if (c.adversary) {
    j["adversary"] = {{"kind", c.adversary->kind}, {"n", c.adversary->n}, {"m", c.adversary->m}};
  }
  j["rounds"] = c.rounds;
  j["seed"] = c.seed;
  j["arrival_prob"] = c.arrival_prob;
  j["clean_passes"] = c.clean_passes;
  j["max_passes"] = c.max_passes;
  if (c.formula) j["formula"] = to_string(*c.formula);
  j["sampler"] = {{"mode", mode_name(c.sampler.mode)},
                  {"budget", c.sampler.downset_budget},
                  {"steps", c.sampler.mcmc_steps}};
  if (!c.out.empty()) j["out"] = c.out;
  return j.dump(indent);
}

Scenario resolve_scenario(const RunConfig& c, const std::string& base_dir) {
  if (c.scenario) return *c.scenario;
  if (c.scenario_path) {
    std::filesystem::path p(*c.scenario_path);
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    return load_scenario(p);
  }
  if (c.generator) return gen_random_scenario(c.seed, *c.generator);
  throw InputError("run config names no scenario source");
}

std::unique_ptr<Adversary> make_adversary(const AdversarySpec& spec, std::uint64_t seed) {
  if (spec.kind == "mergesort") return std::make_unique<MergeSortAdversary>(spec.n, seed);
  if (spec.kind == "pairs") return std::make_unique<PairsAdversary>(spec.n);
  if (spec.kind == "dummy") return std::make_unique<DummyBuyerAdversary>(spec.n, spec.m, seed);
  throw InputError("unknown adversary '" + spec.kind + "'");
}

}  // namespace mechlearn
