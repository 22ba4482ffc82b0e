#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mechlearn/adversaries.hpp"
#include "mechlearn/learner.hpp"
#include "mechlearn/linext.hpp"
#include "mechlearn/types.hpp"

namespace mechlearn {

enum class LearnerKind {
  kWinners,
  kSingleMindedAlloc,
  kAdditiveFixed,
  kUnitDemandGhost,
  kUnitDemandPrime,
  kSingleItem,
  kAdditiveVariable,
  kUnitVariable,
};

const char* to_string(LearnerKind kind);
LearnerKind parse_learner_kind(std::string_view name);
std::vector<LearnerKind> all_learner_kinds();

// Closed-form mistake bounds, identified by their formula text:
//   "2n^2", "nm+n^2", "2(nm)^2", "4n^2mlog2m+n^2", "n^2(mK+1)" with
//   K = ceil(log2(V+1)), "n^2cap" with the ellipsoid cut cap, and the
//   expected bound "4nlog2n" (compared against the mean over runs).
enum class BoundFormula {
  kTwoNSquared,
  kNmPlusNSquared,
  kTwoNmSquared,
  kPrime,
  kAdditiveVariable,
  kUnitVariable,
  kSingleItemExpected,
};

const char* to_string(BoundFormula formula);
BoundFormula parse_bound_formula(std::string_view id);
BoundFormula default_bound(LearnerKind kind);
bool is_expected_bound(BoundFormula formula);
double bound_value(BoundFormula formula, int n, int m, int value_cap);

struct BoundCheck {
  double bound = 0;
  double observed = 0;
  double margin = 0;  // bound - observed
  bool pass = false;
};

// Deterministic bounds compare one total; the expected bound compares the
// mean of `totals`. Throws InputError for an empty list.
BoundCheck verify_bound(BoundFormula formula, int n, int m, int value_cap,
                        const std::vector<long>& totals);
BoundCheck verify_bound(BoundFormula formula, int n, int m, int value_cap, long total);

// Throws InputError explaining why `kind` cannot learn `scenario`.
void check_compatible(LearnerKind kind, const Scenario& scenario);
bool compatible(LearnerKind kind, const Scenario& scenario);

// Identity tiebreak. `seed` drives randomized learners.
std::unique_ptr<OnlineLearner> make_learner(LearnerKind kind, const Scenario& scenario,
                                            std::uint64_t seed = 1,
                                            SamplerOptions sampler = {});

struct TraceRecord {
  long t = 0;  // 1-based
  Round round;
  Observation predicted;
  Observation truth;
  bool mistake = false;
  long cumulative = 0;
  std::vector<LearnerEvent> events;
};

struct RunSummary {
  std::string learner;
  int n = 0;
  int m = 0;
  int value_cap = 0;
  long rounds = 0;
  long total_mistakes = 0;
  BoundFormula formula = BoundFormula::kTwoNSquared;
  double bound = 0;
  double margin = 0;
  bool pass = false;
  std::map<std::string, long> event_counts;
  // Non-empty when the run stopped on a contract violation.
  std::string diagnostic;
};

struct RunResult {
  std::vector<TraceRecord> trace;
  RunSummary summary;
};

// Optional instrumentation. before_update sees the learner state the
// prediction was made from.
struct RunHooks {
  std::function<void(const Round&, const OnlineLearner&)> before_update;
  std::function<void(const TraceRecord&, const OnlineLearner&)> after_update;
};

std::vector<Round> random_rounds(const Scenario& scenario, long count,
                                 std::uint64_t seed, double arrival_prob = 0.5);

// predict -> truth from the scenario's mechanism -> compare -> update, for
// every round. A ContractError (demotion overflow included) ends the run
// with pass = false and the message in summary.diagnostic.
RunResult run_trace(const Scenario& scenario, OnlineLearner& learner,
                    const std::vector<Round>& rounds, const RunHooks& hooks = {},
                    bool keep_trace = true);

// Same protocol with the adversary supplying truth, until it is done or
// max_rounds pass. The summary carries no bound; callers compare
// adversary.forced_mistakes() with the lower bound they expect.
RunResult run_adversary(Adversary& adversary, OnlineLearner& learner,
                        long max_rounds = 1'000'000, const RunHooks& hooks = {});

// Replays the adversary's history through its extracted scenario. Returns
// an empty string when every declared answer is reproduced, otherwise a
// description of the first mismatch.
std::string replay_mismatch(const Adversary& adversary);

struct ConvergeOptions {
  // Consecutive zero-mistake passes that count as converged.
  int clean_passes_required = 1;
  // Pass cap; 0 derives ceil(bound) + clean_passes_required.
  int max_passes = 0;
};

struct ConvergeResult {
  int passes = 0;
  long total_mistakes = 0;
  bool converged = false;
  double bound = 0;
  bool pass = false;  // converged within the cap and the bound
  std::string diagnostic;
};

// Every nonempty arrival set in increasing bitmask order; in variable mode
// crossed with the price grid {0, V/4, V/2, 3V/4, V}^m, dropping tied
// rounds. Throws CapabilityError for n > 12.
std::vector<Round> convergence_pool(const Scenario& scenario);

ConvergeResult run_until_converged(const Scenario& scenario, OnlineLearner& learner,
                                   BoundFormula formula, const ConvergeOptions& options = {},
                                   const RunHooks& hooks = {});

// Exhaustive version space over (priority order, per-buyer preferences) at
// fixed prices, for n, m <= 3:
//   unit-demand:   a strict ranking of the m items per buyer (all valued);
//   single-minded: a nonempty demand set per buyer;
//   additive:      a wanted-item set per buyer.
class BruteForceOracle {
 public:
  static constexpr int kMaxSize = 3;

  struct Vote {
    Observation majority;
    std::size_t support = 0;
    bool unanimous = false;
  };

  BruteForceOracle(int n, int m, ValuationClass valuation_class, ObservationKind kind);

  std::size_t initial_count() const { return initial_; }
  std::size_t count() const { return hypotheses_.size(); }
  const std::vector<Scenario>& hypotheses() const { return hypotheses_; }

  // Drops every hypothesis that disagrees with the observed round.
  void observe(const Round& round, const Observation& truth);
  // Majority observation over the surviving hypotheses; throws
  // ContractError if none survive.
  Vote predict(const Round& round) const;

 private:
  std::size_t initial_ = 0;
  std::vector<Scenario> hypotheses_;
};

}  // namespace mechlearn
