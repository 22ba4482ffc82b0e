#include "mechlearn/trace_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mechlearn {

using nlohmann::json;

namespace {

template <typename T, typename F>
std::string join(const std::vector<T>& xs, char sep, F&& fmt) {
  std::string out;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (k) out += sep;
    out += fmt(xs[k]);
  }
  return out;
}

std::string buyer(int i) { return "b" + std::to_string(i); }

}  // namespace

std::string arrival_token(const BuyerSet& arrival) { return join(arrival, ';', buyer); }

std::string prices_token(const std::optional<std::vector<int>>& prices) {
  if (!prices) return {};
  return join(*prices, ';', [](int p) { return std::to_string(p); });
}

std::string observation_token(const Observation& obs, const BuyerSet& arrival) {
  if (const auto* w = std::get_if<WinnerSet>(&obs)) {
    return w->winners.empty() ? "-" : join(w->winners, ';', buyer);
  }
  const Allocation& a = std::get<Allocation>(obs);
  return join(arrival, ';', [&](int i) {
    const ItemSet* bundle =
        i < static_cast<int>(a.bundles.size()) ? &a.bundles[i] : nullptr;
    if (!bundle || bundle->empty()) return buyer(i) + ":-";
    return buyer(i) + ":" +
           join(*bundle, '|', [](int e) { return "i" + std::to_string(e); });
  });
}

std::string emit_csv(const std::vector<TraceRecord>& trace) {
  std::string out = "t,arrival,prices,predicted,truth,mistake,cumulative,events\n";
  for (const TraceRecord& r : trace) {
    out += std::to_string(r.t);
    out += ',' + arrival_token(r.round.arrival);
    out += ',' + prices_token(r.round.prices);
    out += ',' + observation_token(r.predicted, r.round.arrival);
    out += ',' + observation_token(r.truth, r.round.arrival);
    out += r.mistake ? ",1," : ",0,";
    out += std::to_string(r.cumulative);
    out += ',' + join(r.events, ';', [](const LearnerEvent& e) { return to_token(e); });
    out += '\n';
  }
  return out;
}

void write_csv(const std::vector<TraceRecord>& trace, const std::filesystem::path& path) {
  write_text(path, emit_csv(trace));
}

std::string summary_to_json(const RunSummary& s, int indent) {
  json j;
  j["learner"] = s.learner;
  j["n"] = s.n;
  j["m"] = s.m;
  j["V"] = s.value_cap;
  j["total_mistakes"] = s.total_mistakes;
  j["bound"] = s.bound;
  j["pass"] = s.pass;
  j["rounds"] = s.rounds;
  j["margin"] = s.margin;
  j["formula"] = to_string(s.formula);
  j["event_counts"] = s.event_counts;
  j["diagnostic"] = s.diagnostic;
  return j.dump(indent) + "\n";
}

RunSummary summary_from_json(std::string_view text) {
  RunSummary s;
  try {
    const json j = json::parse(text);
    s.learner = j.at("learner").get<std::string>();
    s.n = j.at("n").get<int>();
    s.m = j.at("m").get<int>();
    s.value_cap = j.at("V").get<int>();
    s.total_mistakes = j.at("total_mistakes").get<long>();
    s.bound = j.at("bound").get<double>();
    s.pass = j.at("pass").get<bool>();
    s.rounds = j.value("rounds", 0L);
    s.margin = j.value("margin", s.bound - static_cast<double>(s.total_mistakes));
    if (j.contains("formula")) s.formula = parse_bound_formula(j["formula"].get<std::string>());
    if (j.contains("event_counts")) {
      s.event_counts = j["event_counts"].get<std::map<std::string, long>>();
    }
    s.diagnostic = j.value("diagnostic", std::string{});
  } catch (const json::exception& e) {
    throw InputError(std::string("summary JSON: ") + e.what());
  }
  return s;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace mechlearn
