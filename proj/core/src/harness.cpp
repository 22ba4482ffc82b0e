#include "mechlearn/harness.hpp"

#include <cmath>
#include <numeric>

#include "mechlearn/learners_fixed.hpp"
#include "mechlearn/learners_priced.hpp"
#include "mechlearn/model.hpp"

namespace mechlearn {

// ---------------------------------------------------------------------------
// Names

namespace {

struct LearnerName {
  LearnerKind kind;
  const char* name;
};

constexpr LearnerName kLearnerNames[] = {
    {LearnerKind::kWinners, "winners"},
    {LearnerKind::kSingleMindedAlloc, "single_minded_alloc"},
    {LearnerKind::kAdditiveFixed, "additive_fixed"},
    {LearnerKind::kUnitDemandGhost, "unit_demand_ghost"},
    {LearnerKind::kUnitDemandPrime, "unit_demand_prime"},
    {LearnerKind::kSingleItem, "single_item"},
    {LearnerKind::kAdditiveVariable, "additive_variable"},
    {LearnerKind::kUnitVariable, "unit_variable"},
};

struct FormulaName {
  BoundFormula formula;
  const char* id;
};

constexpr FormulaName kFormulaNames[] = {
    {BoundFormula::kTwoNSquared, "2n^2"},
    {BoundFormula::kNmPlusNSquared, "nm+n^2"},
    {BoundFormula::kTwoNmSquared, "2(nm)^2"},
    {BoundFormula::kPrime, "4n^2mlog2m+n^2"},
    {BoundFormula::kAdditiveVariable, "n^2(mK+1)"},
    {BoundFormula::kUnitVariable, "n^2cap"},
    {BoundFormula::kSingleItemExpected, "4nlog2n"},
};

}  // namespace

const char* to_string(LearnerKind kind) {
  for (const auto& e : kLearnerNames) {
    if (e.kind == kind) return e.name;
  }
  return "?";
}

LearnerKind parse_learner_kind(std::string_view name) {
  for (const auto& e : kLearnerNames) {
    if (name == e.name) return e.kind;
  }
  throw InputError("unknown learner '" + std::string(name) + "'");
}

std::vector<LearnerKind> all_learner_kinds() {
  std::vector<LearnerKind> out;
  for (const auto& e : kLearnerNames) out.push_back(e.kind);
  return out;
}

const char* to_string(BoundFormula formula) {
  for (const auto& e : kFormulaNames) {
    if (e.formula == formula) return e.id;
  }
  return "?";
}

BoundFormula parse_bound_formula(std::string_view id) {
  for (const auto& e : kFormulaNames) {
    if (id == e.id) return e.formula;
  }
  throw InputError("unknown bound formula '" + std::string(id) + "'");
}

// ---------------------------------------------------------------------------
// Bounds

BoundFormula default_bound(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::kWinners:
    case LearnerKind::kSingleMindedAlloc: return BoundFormula::kTwoNSquared;
    case LearnerKind::kAdditiveFixed: return BoundFormula::kNmPlusNSquared;
    case LearnerKind::kUnitDemandGhost: return BoundFormula::kTwoNmSquared;
    case LearnerKind::kUnitDemandPrime: return BoundFormula::kPrime;
    case LearnerKind::kSingleItem: return BoundFormula::kSingleItemExpected;
    case LearnerKind::kAdditiveVariable: return BoundFormula::kAdditiveVariable;
    case LearnerKind::kUnitVariable: return BoundFormula::kUnitVariable;
  }
  return BoundFormula::kTwoNSquared;
}

bool is_expected_bound(BoundFormula formula) {
  return formula == BoundFormula::kSingleItemExpected;
}

double bound_value(BoundFormula formula, int n, int m, int value_cap) {
  const double nn = static_cast<double>(n) * n;
  switch (formula) {
    case BoundFormula::kTwoNSquared: return 2 * nn;
    case BoundFormula::kNmPlusNSquared: return static_cast<double>(n) * m + nn;
    case BoundFormula::kTwoNmSquared: {
      const double nm = static_cast<double>(n) * m;
      return 2 * nm * nm;
    }
    case BoundFormula::kPrime: return 4 * nn * m * std::log2(m) + nn;
    case BoundFormula::kAdditiveVariable: {
      const double k = std::ceil(std::log2(value_cap + 1.0));
      return nn * (m * k + 1);
    }
    case BoundFormula::kUnitVariable: return nn * Ellipsoid::cut_cap(m, value_cap);
    case BoundFormula::kSingleItemExpected: return 4.0 * n * std::log2(n);
  }
  throw InputError("unknown bound formula");
}

BoundCheck verify_bound(BoundFormula formula, int n, int m, int value_cap,
                        const std::vector<long>& totals) {
  if (totals.empty()) throw InputError("verify_bound: no runs to check");
  BoundCheck out;
  out.bound = bound_value(formula, n, m, value_cap);
  if (is_expected_bound(formula)) {
    out.observed = std::accumulate(totals.begin(), totals.end(), 0.0) /
                   static_cast<double>(totals.size());
  } else {
    out.observed = static_cast<double>(*std::max_element(totals.begin(), totals.end()));
  }
  out.margin = out.bound - out.observed;
  out.pass = out.observed <= out.bound;
  return out;
}

BoundCheck verify_bound(BoundFormula formula, int n, int m, int value_cap, long total) {
  return verify_bound(formula, n, m, value_cap, std::vector<long>{total});
}

// ---------------------------------------------------------------------------
// Learner construction

void check_compatible(LearnerKind kind, const Scenario& s) {
  auto need = [&](bool ok, const std::string& what) {
    if (!ok) {
      throw InputError(std::string("learner ") + to_string(kind) + " needs " + what);
    }
  };
  const bool fixed = s.price_mode == PriceMode::kFixed;
  const bool alloc = s.observation_kind == ObservationKind::kAllocation;
  const ValuationClass c = s.valuation_class;
  switch (kind) {
    case LearnerKind::kWinners:
      need(c == ValuationClass::kSingleMinded, "single-minded buyers");
      need(!alloc, "winner-set observations");
      need(fixed, "fixed prices");
      break;
    case LearnerKind::kSingleMindedAlloc:
      need(c == ValuationClass::kSingleMinded, "single-minded buyers");
      need(alloc, "allocation observations");
      need(fixed, "fixed prices");
      break;
    case LearnerKind::kAdditiveFixed:
      need(c == ValuationClass::kAdditive, "additive buyers");
      need(alloc, "allocation observations");
      need(fixed, "fixed prices");
      break;
    case LearnerKind::kUnitDemandGhost:
      need(c == ValuationClass::kUnitDemand, "unit-demand buyers");
      need(alloc, "allocation observations");
      need(fixed, "fixed prices");
      for (const Valuation& v : s.valuations) {
        for (int x : std::get<UnitDemand>(v).values) {
          need(x > 0, "every item value positive (ghost reduction)");
        }
      }
      break;
    case LearnerKind::kUnitDemandPrime:
      need(c == ValuationClass::kUnitDemand, "unit-demand buyers");
      need(alloc, "allocation observations");
      need(fixed, "fixed prices");
      break;
    case LearnerKind::kSingleItem:
      need(c == ValuationClass::kSingleMinded, "single-minded buyers");
      need(!alloc, "winner-set observations");
      need(fixed, "fixed prices");
      need(s.m == 1, "a single item");
      break;
    case LearnerKind::kAdditiveVariable:
      need(c == ValuationClass::kAdditive, "additive buyers");
      need(alloc, "allocation observations");
      need(!fixed, "variable prices");
      break;
    case LearnerKind::kUnitVariable:
      need(c == ValuationClass::kUnitDemand, "unit-demand buyers");
      need(alloc, "allocation observations");
      need(!fixed, "variable prices");
      break;
  }
}

bool compatible(LearnerKind kind, const Scenario& scenario) {
  try {
    check_compatible(kind, scenario);
    return true;
  } catch (const InputError&) {
    return false;
  }
}

std::unique_ptr<OnlineLearner> make_learner(LearnerKind kind, const Scenario& s,
                                            std::uint64_t seed, SamplerOptions sampler) {
  check_compatible(kind, s);
  switch (kind) {
    case LearnerKind::kWinners: return std::make_unique<WinnersLearner>(s.n);
    case LearnerKind::kSingleMindedAlloc:
      return std::make_unique<SingleMindedAllocLearner>(s.n, s.m);
    case LearnerKind::kAdditiveFixed: return std::make_unique<AdditiveFixedLearner>(s.n, s.m);
    case LearnerKind::kUnitDemandGhost:
      return std::make_unique<UnitDemandGhostLearner>(s.n, s.m);
    case LearnerKind::kUnitDemandPrime:
      return std::make_unique<UnitDemandPrimeLearner>(s.n, s.m, seed, sampler);
    case LearnerKind::kSingleItem:
      return std::make_unique<SingleItemLearner>(s.n, seed, sampler);
    case LearnerKind::kAdditiveVariable:
      return std::make_unique<AdditiveVariableLearner>(s.n, s.m, s.value_cap);
    case LearnerKind::kUnitVariable:
      return std::make_unique<UnitVariableLearner>(s.n, s.m, s.value_cap);
  }
  throw InputError("unknown learner kind");
}

// ---------------------------------------------------------------------------
// Online protocol

std::vector<Round> random_rounds(const Scenario& scenario, long count,
                                 std::uint64_t seed, double arrival_prob) {
  SplitMix64 rng(seed);
  std::vector<Round> out;
  out.reserve(static_cast<std::size_t>(std::max(0L, count)));
  for (long i = 0; i < count; ++i) out.push_back(gen_random_round(scenario, rng, arrival_prob));
  return out;
}

namespace {

void count_events(RunSummary& summary, const std::vector<LearnerEvent>& events) {
  for (const LearnerEvent& e : events) ++summary.event_counts[kind_name(e.kind)];
}

}  // namespace

RunResult run_trace(const Scenario& s, OnlineLearner& learner,
                    const std::vector<Round>& rounds, const RunHooks& hooks,
                    bool keep_trace) {
  if (learner.observation_kind() != s.observation_kind) {
    throw InputError("learner and scenario disagree on the observation kind");
  }
  RunResult result;
  RunSummary& sum = result.summary;
  sum.learner = learner.name();
  sum.n = s.n;
  sum.m = s.m;
  sum.value_cap = s.value_cap;

  long cumulative = 0;
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    const Round& round = rounds[i];
    validate_round(s, round);
    TraceRecord rec;
    rec.t = static_cast<long>(i) + 1;
    rec.round = round;
    try {
      rec.predicted = learner.predict(round);
      rec.truth = observe(allocate(s, round), s.observation_kind);
      if (hooks.before_update) hooks.before_update(round, learner);
      rec.events = learner.update(round, rec.truth);
    } catch (const ContractError& e) {
      sum.diagnostic = "round " + std::to_string(rec.t) + ": " + e.what();
      break;
    }
    rec.mistake = rec.predicted != rec.truth;
    cumulative += rec.mistake ? 1 : 0;
    rec.cumulative = cumulative;
    count_events(sum, rec.events);
    ++sum.rounds;
    if (hooks.after_update) hooks.after_update(rec, learner);
    if (keep_trace) result.trace.push_back(std::move(rec));
  }
  sum.total_mistakes = cumulative;
  return result;
}

RunResult run_adversary(Adversary& adversary, OnlineLearner& learner, long max_rounds,
                        const RunHooks& hooks) {
  if (learner.observation_kind() != adversary.observation_kind()) {
    throw InputError("learner and adversary disagree on the observation kind");
  }
  RunResult result;
  RunSummary& sum = result.summary;
  sum.learner = learner.name();
  long cumulative = 0;
  while (!adversary.done() && sum.rounds < max_rounds) {
    TraceRecord rec;
    rec.t = sum.rounds + 1;
    rec.round = adversary.next_round();
    try {
      rec.predicted = learner.predict(rec.round);
      rec.truth = adversary.respond(rec.predicted);
      if (hooks.before_update) hooks.before_update(rec.round, learner);
      rec.events = learner.update(rec.round, rec.truth);
    } catch (const ContractError& e) {
      sum.diagnostic = "round " + std::to_string(rec.t) + ": " + e.what();
      break;
    }
    rec.mistake = rec.predicted != rec.truth;
    cumulative += rec.mistake ? 1 : 0;
    rec.cumulative = cumulative;
    count_events(sum, rec.events);
    ++sum.rounds;
    if (hooks.after_update) hooks.after_update(rec, learner);
    result.trace.push_back(std::move(rec));
  }
  const Scenario s = adversary.extract_consistent_scenario();
  sum.n = s.n;
  sum.m = s.m;
  sum.value_cap = s.value_cap;
  sum.total_mistakes = cumulative;
  sum.pass = sum.diagnostic.empty();
  return result;
}

std::string replay_mismatch(const Adversary& adversary) {
  const Scenario s = adversary.extract_consistent_scenario();
  const auto problems = validate_scenario(s);
  if (!problems.empty()) return "extracted scenario is invalid: " + problems.front();
  const auto& history = adversary.history();
  for (std::size_t i = 0; i < history.size(); ++i) {
    const Observation replay = observe(allocate(s, history[i].round), s.observation_kind);
    if (replay != history[i].declared) {
      return "round " + std::to_string(i + 1) + " replays differently";
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Convergence

std::vector<Round> convergence_pool(const Scenario& s) {
  if (s.n > 12) throw CapabilityError("subset enumeration is limited to n <= 12");
  std::vector<BuyerSet> subsets;
  for (std::uint32_t mask = 1; mask < (1U << s.n); ++mask) {
    BuyerSet b;
    for (int i = 0; i < s.n; ++i) {
      if (mask >> i & 1U) b.push_back(i);
    }
    subsets.push_back(std::move(b));
  }
  std::vector<Round> pool;
  if (s.price_mode == PriceMode::kFixed) {
    for (auto& b : subsets) pool.push_back(Round{std::move(b), std::nullopt});
    return pool;
  }
  const int v = s.value_cap;
  std::vector<int> grid = {0, v / 4, v / 2, 3 * v / 4, v};
  normalize(grid);
  const double combos = std::pow(static_cast<double>(grid.size()), s.m) * subsets.size();
  if (combos > 2e6) throw CapabilityError("price-grid pool would exceed 2e6 rounds");
  std::vector<std::size_t> digit(s.m, 0);
  for (;;) {
    std::vector<int> prices(s.m);
    for (int e = 0; e < s.m; ++e) prices[e] = grid[digit[e]];
    for (const BuyerSet& b : subsets) {
      Round r{b, prices};
      if (!has_utility_tie(s, r)) pool.push_back(std::move(r));
    }
    int e = 0;
    while (e < s.m && ++digit[e] == grid.size()) digit[e++] = 0;
    if (e == s.m) break;
  }
  return pool;
}

ConvergeResult run_until_converged(const Scenario& s, OnlineLearner& learner,
                                   BoundFormula formula, const ConvergeOptions& options,
                                   const RunHooks& hooks) {
  ConvergeResult out;
  out.bound = bound_value(formula, s.n, s.m, s.value_cap);
  const int cap = options.max_passes > 0
                      ? options.max_passes
                      : static_cast<int>(std::ceil(out.bound)) + options.clean_passes_required;
  const std::vector<Round> pool = convergence_pool(s);
  int clean = 0;
  while (out.passes < cap) {
    const RunResult pass = run_trace(s, learner, pool, hooks, false);
    ++out.passes;
    out.total_mistakes += pass.summary.total_mistakes;
    if (!pass.summary.diagnostic.empty()) {
      out.diagnostic = pass.summary.diagnostic;
      return out;
    }
    clean = pass.summary.total_mistakes == 0 ? clean + 1 : 0;
    if (clean >= options.clean_passes_required) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) out.diagnostic = "no clean pass within " + std::to_string(cap) + " passes";
  out.pass = out.converged && out.total_mistakes <= out.bound;
  return out;
}

// ---------------------------------------------------------------------------
// Brute-force oracle

namespace {

std::vector<Valuation> preference_choices(int m, ValuationClass c) {
  std::vector<Valuation> out;
  switch (c) {
    case ValuationClass::kUnitDemand: {
      std::vector<int> rank(m);
      std::iota(rank.begin(), rank.end(), 0);
      do {
        std::vector<int> v(m);
        for (int r = 0; r < m; ++r) v[rank[r]] = m - r;
        out.emplace_back(UnitDemand{v});
      } while (std::next_permutation(rank.begin(), rank.end()));
      break;
    }
    case ValuationClass::kSingleMinded:
      for (int mask = 1; mask < (1 << m); ++mask) {
        ItemSet d;
        for (int e = 0; e < m; ++e) {
          if (mask >> e & 1) d.push_back(e);
        }
        out.emplace_back(SingleMinded{d, 1});
      }
      break;
    case ValuationClass::kAdditive:
      for (int mask = 0; mask < (1 << m); ++mask) {
        std::vector<int> v(m);
        for (int e = 0; e < m; ++e) v[e] = mask >> e & 1;
        out.emplace_back(Additive{v});
      }
      break;
  }
  return out;
}

}  // namespace

BruteForceOracle::BruteForceOracle(int n, int m, ValuationClass c, ObservationKind kind) {
  if (n < 1 || m < 1 || n > kMaxSize || m > kMaxSize) {
    throw CapabilityError("brute-force oracle is limited to 1 <= n, m <= 3");
  }
  const std::vector<Valuation> choices = preference_choices(m, c);
  Scenario base;
  base.n = n;
  base.m = m;
  base.value_cap = c == ValuationClass::kUnitDemand ? m : 1;
  base.valuation_class = c;
  base.observation_kind = kind;
  base.true_order.resize(n);
  std::iota(base.true_order.begin(), base.true_order.end(), 0);

  std::size_t per_order = 1;
  for (int i = 0; i < n; ++i) per_order *= choices.size();
  do {
    for (std::size_t code = 0; code < per_order; ++code) {
      Scenario h = base;
      std::size_t rest = code;
      for (int i = 0; i < n; ++i) {
        h.valuations.push_back(choices[rest % choices.size()]);
        rest /= choices.size();
      }
      hypotheses_.push_back(std::move(h));
    }
  } while (std::next_permutation(base.true_order.begin(), base.true_order.end()));
  initial_ = hypotheses_.size();
}

void BruteForceOracle::observe(const Round& round, const Observation& truth) {
  std::erase_if(hypotheses_, [&](const Scenario& h) {
    return mechlearn::observe(allocate(h, round), h.observation_kind) != truth;
  });
}

BruteForceOracle::Vote BruteForceOracle::predict(const Round& round) const {
  if (hypotheses_.empty()) throw ContractError("no hypothesis is consistent with the history");
  std::vector<std::pair<Observation, std::size_t>> tally;
  for (const Scenario& h : hypotheses_) {
    Observation o = mechlearn::observe(allocate(h, round), h.observation_kind);
    auto it = std::find_if(tally.begin(), tally.end(),
                           [&](const auto& entry) { return entry.first == o; });
    if (it == tally.end()) {
      tally.emplace_back(std::move(o), 1);
    } else {
      ++it->second;
    }
  }
  auto best = std::max_element(tally.begin(), tally.end(), [](const auto& a, const auto& b) {
    return a.second < b.second;
  });
  return {best->first, best->second, tally.size() == 1};
}

}  // namespace mechlearn
