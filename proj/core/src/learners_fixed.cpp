#include "mechlearn/learners_fixed.hpp"

#include <numeric>

#include "learner_util.hpp"

namespace mechlearn {

using internal::check_arrival;
using internal::event;
using internal::expect_allocation;
using internal::expect_winners;
using Kind = LearnerEvent::Kind;

namespace {

std::vector<BuyerId> identity(int n) {
  std::vector<BuyerId> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// ConflictGraph

ConflictGraph::ConflictGraph(int n) : n_(n) {
  if (n < 0) throw InputError("ConflictGraph: negative size");
  adj_.assign(static_cast<std::size_t>(n) * n, 1);
  for (int i = 0; i < n; ++i) adj_[i * n + i] = 0;
  edges_ = n * (n - 1) / 2;
}

bool ConflictGraph::has_edge(int a, int b) const {
  if (a < 0 || a >= n_ || b < 0 || b >= n_) {
    throw InputError("ConflictGraph: vertex out of range");
  }
  return adj_[a * n_ + b] != 0;
}

bool ConflictGraph::remove_edge(int a, int b) {
  if (!has_edge(a, b)) return false;
  adj_[a * n_ + b] = 0;
  adj_[b * n_ + a] = 0;
  --edges_;
  return true;
}

// ---------------------------------------------------------------------------
// WinnersCore

WinnersCore::WinnersCore(std::vector<int> tiebreak)
    : order_(std::move(tiebreak)), graph_(order_.size()) {}

std::vector<int> WinnersCore::predict(const std::vector<int>& arrival) const {
  std::vector<int> admitted;
  for (int i : order_.order_subset(arrival)) {
    bool blocked = false;
    for (int j : admitted) {
      if (graph_.has_edge(i, j)) {
        blocked = true;
        break;
      }
    }
    if (!blocked) admitted.push_back(i);
  }
  normalize(admitted);
  return admitted;
}

WinnersCore::Outcome WinnersCore::learn(const std::vector<int>& arrival,
                                        const std::vector<int>& truth,
                                        std::int64_t time) {
  if (!is_subset(truth, arrival)) {
    throw InputError("true winners must be a subset of the arrivals");
  }
  Outcome out;
  const std::vector<int> predicted = predict(arrival);
  if (predicted == truth) return out;
  out.mistake = true;

  for (std::size_t a = 0; a < truth.size(); ++a) {
    for (std::size_t b = a + 1; b < truth.size(); ++b) {
      if (graph_.remove_edge(truth[a], truth[b])) {
        out.deleted.emplace_back(truth[a], truth[b]);
      }
    }
  }
  if (!out.deleted.empty()) return out;

  const std::vector<int> wrong = set_minus(predicted, truth);
  if (wrong.empty()) {
    throw ContractError(
        "winners update: true winners conflict-free yet excluded; the "
        "environment is not single-minded with a fixed order");
  }
  const int first = order_.kth_in_subset(1, wrong);
  order_.demote(first, time);
  out.demoted = first;
  return out;
}

// ---------------------------------------------------------------------------
// WinnersLearner

WinnersLearner::WinnersLearner(int n) : WinnersLearner(n, identity(n)) {}

WinnersLearner::WinnersLearner(int n, std::vector<BuyerId> tiebreak)
    : n_(n), core_(std::move(tiebreak)) {
  if (core_.size() != n) throw InputError("tiebreak length differs from n");
}

Observation WinnersLearner::predict(const Round& round) const {
  check_arrival(round, n_);
  return WinnerSet{core_.predict(round.arrival)};
}

std::vector<LearnerEvent> WinnersLearner::update(const Round& round,
                                                 const Observation& truth) {
  check_arrival(round, n_);
  const BuyerSet& winners = expect_winners(truth, round);
  const std::int64_t t = time_++;
  std::vector<LearnerEvent> events;
  const WinnersCore::Outcome out = core_.learn(round.arrival, winners, t);
  for (auto [a, b] : out.deleted) {
    LearnerEvent e = event(Kind::kEdgeDeleted, a);
    e.other = b;
    events.push_back(e);
  }
  if (out.demoted) events.push_back(event(Kind::kDemoted, *out.demoted));
  return events;
}

// ---------------------------------------------------------------------------
// SingleMindedAllocLearner

SingleMindedAllocLearner::SingleMindedAllocLearner(int n, int m)
    : SingleMindedAllocLearner(n, m, identity(n)) {}

SingleMindedAllocLearner::SingleMindedAllocLearner(int n, int m,
                                                   std::vector<BuyerId> tiebreak)
    : n_(n), m_(m), order_(std::move(tiebreak)), demand_(n) {
  if (order_.size() != n) throw InputError("tiebreak length differs from n");
  if (m < 1) throw InputError("need at least one item");
}

Allocation SingleMindedAllocLearner::predict_allocation(const Round& round) const {
  check_arrival(round, n_);
  Allocation out{std::vector<ItemSet>(n_)};
  std::vector<char> taken(m_, 0);
  for (BuyerId i : order_.order_subset(round.arrival)) {
    const auto& d = demand_[i];
    if (!d) continue;
    bool free = true;
    for (ItemId e : *d) free = free && !taken[e];
    if (!free) continue;
    for (ItemId e : *d) taken[e] = 1;
    out.bundles[i] = *d;
  }
  return out;
}

Observation SingleMindedAllocLearner::predict(const Round& round) const {
  return predict_allocation(round);
}

std::vector<LearnerEvent> SingleMindedAllocLearner::update(const Round& round,
                                                           const Observation& truth) {
  const Allocation predicted = predict_allocation(round);
  const Allocation& actual = expect_allocation(truth, round, n_, m_);
  const std::int64_t t = time_++;
  std::vector<LearnerEvent> events;
  const auto first = order_.first_mistake(actual, predicted);
  if (!first) return events;

  const BuyerId i = *first;
  const ItemSet& won = actual.bundles[i];
  if (!won.empty() && !demand_[i]) {
    demand_[i] = won;
    events.push_back(event(Kind::kDemandLearned, i));
    return events;
  }
  if (!won.empty() && *demand_[i] != won) {
    throw InputError("buyer " + std::to_string(i) +
                     " won a bundle different from its learned demand set");
  }
  // Predicted to win but lost, or won a bundle the prediction blocked.
  order_.demote(i, t);
  events.push_back(event(Kind::kDemoted, i));
  return events;
}

// ---------------------------------------------------------------------------
// AdditiveFixedLearner

AdditiveFixedLearner::AdditiveFixedLearner(int n, int m)
    : AdditiveFixedLearner(n, m, identity(n)) {}

AdditiveFixedLearner::AdditiveFixedLearner(int n, int m, std::vector<BuyerId> tiebreak)
    : n_(n), m_(m), order_(std::move(tiebreak)),
      bits_(static_cast<std::size_t>(n) * m, 0) {
  if (order_.size() != n) throw InputError("tiebreak length differs from n");
  if (m < 1) throw InputError("need at least one item");
}

Allocation AdditiveFixedLearner::predict_allocation(const Round& round) const {
  check_arrival(round, n_);
  Allocation out{std::vector<ItemSet>(n_)};
  std::vector<char> taken(m_, 0);
  for (BuyerId i : order_.order_subset(round.arrival)) {
    for (ItemId e = 0; e < m_; ++e) {
      if (taken[e] || !bits_[i * m_ + e]) continue;
      taken[e] = 1;
      out.bundles[i].push_back(e);
    }
  }
  return out;
}

Observation AdditiveFixedLearner::predict(const Round& round) const {
  return predict_allocation(round);
}

std::vector<LearnerEvent> AdditiveFixedLearner::update(const Round& round,
                                                       const Observation& truth) {
  const Allocation predicted = predict_allocation(round);
  const Allocation& actual = expect_allocation(truth, round, n_, m_);
  const std::int64_t t = time_++;
  std::vector<LearnerEvent> events;
  const auto first = order_.first_mistake(actual, predicted);
  if (!first) return events;

  const BuyerId i = *first;
  for (ItemId e : set_minus(actual.bundles[i], predicted.bundles[i])) {
    if (bits_[i * m_ + e]) continue;
    bits_[i * m_ + e] = 1;
    LearnerEvent ev = event(Kind::kBitSet, i);
    ev.item = e;
    events.push_back(ev);
  }
  if (!set_minus(predicted.bundles[i], actual.bundles[i]).empty()) {
    order_.demote(i, t);
    events.push_back(event(Kind::kDemoted, i));
  }
  return events;
}

// ---------------------------------------------------------------------------
// Ghost reduction

GhostIndex::GhostIndex(int n, int m) : n_(n), m_(m) {
  if (n < 0 || m < 1) throw InputError("GhostIndex: bad dimensions");
}

int GhostIndex::id(BuyerId buyer, ItemId item) const {
  if (buyer < 0 || buyer >= n_ || item < 0 || item >= m_) {
    throw InputError("GhostIndex: buyer or item out of range");
  }
  return buyer * m_ + item;
}

namespace {

std::vector<int> ghost_tiebreak(const GhostIndex& g, int m,
                                const std::vector<BuyerId>& buyers) {
  std::vector<int> out;
  out.reserve(buyers.size() * m);
  for (BuyerId b : buyers) {
    for (ItemId k = 0; k < m; ++k) out.push_back(g.id(b, k));
  }
  return out;
}

}  // namespace

UnitDemandGhostLearner::UnitDemandGhostLearner(int n, int m)
    : UnitDemandGhostLearner(n, m, identity(n)) {}

UnitDemandGhostLearner::UnitDemandGhostLearner(int n, int m,
                                               const std::vector<BuyerId>& tiebreak)
    : n_(n), m_(m), ghosts_(n, m) {
  if (static_cast<int>(tiebreak.size()) != n) {
    throw InputError("tiebreak length differs from n");
  }
  LevelOrder check(tiebreak);  // validates the permutation
  core_ = WinnersCore(ghost_tiebreak(ghosts_, m, tiebreak));
}

std::vector<int> UnitDemandGhostLearner::ghost_arrival(const BuyerSet& arrival) const {
  std::vector<int> out;
  out.reserve(arrival.size() * m_);
  for (BuyerId b : arrival) {
    for (ItemId k = 0; k < m_; ++k) out.push_back(ghosts_.id(b, k));
  }
  return out;
}

Observation UnitDemandGhostLearner::predict(const Round& round) const {
  check_arrival(round, n_);
  Allocation out{std::vector<ItemSet>(n_)};
  for (int g : core_.predict(ghost_arrival(round.arrival))) {
    out.bundles[ghosts_.buyer(g)].push_back(ghosts_.item(g));
  }
  for (ItemSet& x : out.bundles) normalize(x);
  return out;
}

std::vector<LearnerEvent> UnitDemandGhostLearner::update(const Round& round,
                                                         const Observation& truth) {
  check_arrival(round, n_);
  const Allocation& actual = expect_allocation(truth, round, n_, m_);
  std::vector<int> winners;
  for (BuyerId b = 0; b < n_; ++b) {
    const ItemSet& x = actual.bundles[b];
    if (x.size() > 1) {
      throw InputError("unit-demand truth gives buyer " + std::to_string(b) +
                       " more than one item");
    }
    if (x.size() == 1) winners.push_back(ghosts_.id(b, x.front()));
  }
  normalize(winners);
  const std::int64_t t = time_++;
  const WinnersCore::Outcome out = core_.learn(ghost_arrival(round.arrival), winners, t);
  std::vector<LearnerEvent> events;
  for (auto [a, b] : out.deleted) {
    LearnerEvent e = event(Kind::kEdgeDeleted, ghosts_.buyer(a));
    e.item = ghosts_.item(a);
    e.other = ghosts_.buyer(b);
    e.other_item = ghosts_.item(b);
    events.push_back(e);
  }
  if (out.demoted) {
    LearnerEvent e = event(Kind::kDemoted, ghosts_.buyer(*out.demoted));
    e.item = ghosts_.item(*out.demoted);
    events.push_back(e);
  }
  return events;
}

// ---------------------------------------------------------------------------
// UnitDemandPrimeLearner

UnitDemandPrimeLearner::UnitDemandPrimeLearner(int n, int m, std::uint64_t seed,
                                               SamplerOptions options)
    : UnitDemandPrimeLearner(n, m, identity(n), seed, options) {}

UnitDemandPrimeLearner::UnitDemandPrimeLearner(int n, int m,
                                               std::vector<BuyerId> tiebreak,
                                               std::uint64_t seed,
                                               SamplerOptions options)
    : n_(n), m_(m), order_(std::move(tiebreak)),
      options_(options), rng_(seed), cache_(n) {
  if (order_.size() != n) throw InputError("tiebreak length differs from n");
  if (m < 1 || m + 1 > PartialOrder::kMaxSize) {
    throw InputError("unit-demand prime learner needs 1 <= m < 64");
  }
  prefs_.assign(n, PartialOrder(m + 1));
}

const LinearExtensionSampler& UnitDemandPrimeLearner::sampler(BuyerId i) const {
  auto& slot = cache_[i];
  if (!slot || slot->version() != prefs_[i].version()) {
    slot.emplace(prefs_[i], options_);
  }
  return *slot;
}

Allocation UnitDemandPrimeLearner::predict_with(const Round& round,
                                                SplitMix64& rng) const {
  check_arrival(round, n_);
  Allocation out{std::vector<ItemSet>(n_)};
  std::vector<int> available(m_ + 1);
  std::iota(available.begin(), available.end(), 0);
  for (BuyerId i : order_.order_subset(round.arrival)) {
    const int top = predict_top(sampler(i), available, rng);
    if (top == m_) continue;
    out.bundles[i] = {top};
    available.erase(std::find(available.begin(), available.end(), top));
  }
  return out;
}

Observation UnitDemandPrimeLearner::predict(const Round& round) const {
  SplitMix64 rng = rng_;
  return predict_with(round, rng);
}

std::vector<LearnerEvent> UnitDemandPrimeLearner::update(const Round& round,
                                                         const Observation& truth) {
  const Allocation predicted = predict_with(round, rng_);
  const Allocation& actual = expect_allocation(truth, round, n_, m_);
  const std::int64_t t = time_++;
  std::vector<LearnerEvent> events;
  const auto first = order_.first_mistake(actual, predicted);
  if (!first) return events;

  const BuyerId i = *first;
  if (actual.bundles[i].size() > 1) {
    throw InputError("unit-demand truth gives buyer " + std::to_string(i) +
                     " more than one item");
  }
  const int chosen = actual.bundles[i].empty() ? m_ : actual.bundles[i].front();
  const int guessed = predicted.bundles[i].empty() ? m_ : predicted.bundles[i].front();
  LearnerEvent c = event(Kind::kConstraintAdded, i);
  c.item = chosen == m_ ? -1 : chosen;
  c.other_item = guessed == m_ ? -1 : guessed;
  events.push_back(c);
  if (!prefs_[i].add_constraint(chosen, guessed)) {
    order_.demote(i, t);
    events.push_back(event(Kind::kDemoted, i));
    prefs_[i].reset();
    events.push_back(event(Kind::kReset, i));
  }
  return events;
}

// ---------------------------------------------------------------------------
// SingleItemLearner

SingleItemLearner::SingleItemLearner(int n, std::uint64_t seed, SamplerOptions options)
    : halving_(n, options), rng_(seed) {}

Observation SingleItemLearner::predict(const Round& round) const {
  check_arrival(round, halving_.size());
  SplitMix64 rng = rng_;
  return WinnerSet{{halving_.predict(round.arrival, rng)}};
}

std::vector<LearnerEvent> SingleItemLearner::update(const Round& round,
                                                    const Observation& truth) {
  check_arrival(round, halving_.size());
  const BuyerSet& winners = expect_winners(truth, round);
  if (winners.size() != 1) {
    throw InputError("single-item rounds have exactly one winner");
  }
  const BuyerId predicted = halving_.predict(round.arrival, rng_);
  std::vector<LearnerEvent> events;
  for (auto [w, j] : halving_.learn(round.arrival, predicted, winners.front())) {
    LearnerEvent e = event(Kind::kOrderConstraint, w);
    e.other = j;
    events.push_back(e);
  }
  return events;
}

}  // namespace mechlearn
