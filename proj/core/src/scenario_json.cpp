#include "mechlearn/scenario_json.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mechlearn/model.hpp"

namespace mechlearn {

using nlohmann::json;

ValuationClass parse_valuation_class(std::string_view name) {
  if (name == "single_minded") return ValuationClass::kSingleMinded;
  if (name == "additive") return ValuationClass::kAdditive;
  if (name == "unit_demand") return ValuationClass::kUnitDemand;
  throw InputError("unknown valuation_class '" + std::string(name) + "'");
}

PriceMode parse_price_mode(std::string_view name) {
  if (name == "fixed") return PriceMode::kFixed;
  if (name == "variable") return PriceMode::kVariable;
  throw InputError("unknown price_mode '" + std::string(name) + "'");
}

ObservationKind parse_observation_kind(std::string_view name) {
  if (name == "allocation") return ObservationKind::kAllocation;
  if (name == "winner_set") return ObservationKind::kWinnerSet;
  throw InputError("unknown observation_kind '" + std::string(name) + "'");
}

std::string scenario_to_json(const Scenario& s, int indent) {
  json j;
  j["n"] = s.n;
  j["m"] = s.m;
  j["V"] = s.value_cap;
  j["order"] = s.true_order;
  j["valuation_class"] = to_string(s.valuation_class);
  json vals = json::array();
  for (const Valuation& v : s.valuations) {
    if (const auto* sm = std::get_if<SingleMinded>(&v)) {
      vals.push_back({{"demand_set", sm->demand_set}, {"value", sm->value}});
    } else if (const auto* add = std::get_if<Additive>(&v)) {
      vals.push_back(add->values);
    } else {
      vals.push_back(std::get<UnitDemand>(v).values);
    }
  }
  j["valuations"] = std::move(vals);
  j["observation_kind"] = to_string(s.observation_kind);
  j["price_mode"] = to_string(s.price_mode);
  return j.dump(indent);
}

Scenario scenario_from_json(std::string_view text) {
  Scenario s;
  try {
    json j = json::parse(text);
    s.n = j.at("n").get<int>();
    s.m = j.at("m").get<int>();
    s.value_cap = j.at("V").get<int>();
    s.true_order = j.at("order").get<std::vector<BuyerId>>();
    s.valuation_class =
        parse_valuation_class(j.at("valuation_class").get<std::string>());
    s.observation_kind =
        parse_observation_kind(j.at("observation_kind").get<std::string>());
    s.price_mode = parse_price_mode(j.at("price_mode").get<std::string>());
    for (const json& v : j.at("valuations")) {
      switch (s.valuation_class) {
        case ValuationClass::kSingleMinded:
          s.valuations.emplace_back(
              SingleMinded{v.at("demand_set").get<ItemSet>(), v.at("value").get<int>()});
          break;
        case ValuationClass::kAdditive:
          s.valuations.emplace_back(Additive{v.get<std::vector<int>>()});
          break;
        case ValuationClass::kUnitDemand:
          s.valuations.emplace_back(UnitDemand{v.get<std::vector<int>>()});
          break;
      }
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("scenario JSON: ") + e.what());
  }
  auto problems = validate_scenario(s);
  if (!problems.empty()) {
    std::string msg = "invalid scenario:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw InputError(msg);
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << scenario_to_json(s) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace mechlearn
