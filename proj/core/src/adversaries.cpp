#include "mechlearn/adversaries.hpp"

#include <numeric>
#include <string>

#include "mechlearn/model.hpp"

namespace mechlearn {

// ---------------------------------------------------------------------------
// Random scenarios and rounds

void validate_params(const GeneratorParams& p) {
  if (p.n < 1) throw InputError("generator: n must be at least 1");
  if (p.m < 1) throw InputError("generator: m must be at least 1");
  if (p.value_cap < 1) throw InputError("generator: V must be at least 1");
  const int max_demand = p.max_demand == 0 ? p.m : p.max_demand;
  if (p.valuation_class == ValuationClass::kSingleMinded &&
      (p.min_demand < 1 || max_demand > p.m || p.min_demand > max_demand)) {
    throw InputError("generator: demand size range must lie within [1, m]");
  }
  if (p.value_density < 0.0 || p.value_density > 1.0) {
    throw InputError("generator: value_density must be a probability");
  }
}

Scenario gen_random_scenario(std::uint64_t seed, const GeneratorParams& p) {
  validate_params(p);
  SplitMix64 rng(seed);
  Scenario s;
  s.n = p.n;
  s.m = p.m;
  s.value_cap = p.value_cap;
  s.valuation_class = p.valuation_class;
  s.price_mode = p.price_mode;
  s.observation_kind = p.observation_kind;
  s.true_order.resize(p.n);
  std::iota(s.true_order.begin(), s.true_order.end(), 0);
  rng.shuffle(s.true_order);

  const int max_demand = p.max_demand == 0 ? p.m : p.max_demand;
  std::vector<ItemId> items(p.m);
  std::iota(items.begin(), items.end(), 0);
  for (int i = 0; i < p.n; ++i) {
    switch (p.valuation_class) {
      case ValuationClass::kSingleMinded: {
        const int size = rng.between(p.min_demand, max_demand);
        rng.shuffle(items);
        ItemSet d(items.begin(), items.begin() + size);
        normalize(d);
        s.valuations.emplace_back(SingleMinded{d, rng.between(1, p.value_cap)});
        break;
      }
      case ValuationClass::kAdditive:
      case ValuationClass::kUnitDemand: {
        std::vector<int> v(p.m, 0);
        const bool all_positive =
            p.positive_values && p.valuation_class == ValuationClass::kUnitDemand;
        for (int& x : v) {
          if (all_positive || rng.bernoulli(p.value_density)) {
            x = rng.between(1, p.value_cap);
          }
        }
        if (p.valuation_class == ValuationClass::kAdditive) {
          s.valuations.emplace_back(Additive{v});
        } else {
          s.valuations.emplace_back(UnitDemand{v});
        }
        break;
      }
    }
  }
  return s;
}

bool has_utility_tie(const Scenario& s, const Round& round) {
  if (s.valuation_class != ValuationClass::kUnitDemand) return false;
  const std::vector<int> p = effective_prices(s, round);
  for (BuyerId b : round.arrival) {
    const auto& v = std::get<UnitDemand>(s.valuations.at(b)).values;
    std::vector<int> positive;
    for (int e = 0; e < s.m; ++e) {
      if (v[e] - p[e] > 0) positive.push_back(v[e] - p[e]);
    }
    std::sort(positive.begin(), positive.end());
    if (std::adjacent_find(positive.begin(), positive.end()) != positive.end()) {
      return true;
    }
  }
  return false;
}

Round gen_random_round(const Scenario& s, SplitMix64& rng, double arrival_prob) {
  Round r;
  while (r.arrival.empty()) {
    for (BuyerId b = 0; b < s.n; ++b) {
      if (rng.bernoulli(arrival_prob)) r.arrival.push_back(b);
    }
  }
  if (s.price_mode == PriceMode::kVariable) {
    do {
      std::vector<int> p(s.m);
      for (int& x : p) x = rng.between(0, s.value_cap);
      r.prices = std::move(p);
    } while (has_utility_tie(s, r));
  }
  return r;
}

// ---------------------------------------------------------------------------
// MergeSortSchedule

MergeSortSchedule::MergeSortSchedule(std::vector<int> elements) {
  for (int x : elements) runs_.push_back({x});
  settle();
}

bool MergeSortSchedule::done() const { return runs_.size() <= 1; }

void MergeSortSchedule::settle() {
  for (;;) {
    if (next_ + 1 < runs_.size()) {
      const auto& left = runs_[next_];
      const auto& right = runs_[next_ + 1];
      if (left_pos_ < left.size() && right_pos_ < right.size()) return;
      out_.insert(out_.end(), left.begin() + static_cast<std::ptrdiff_t>(left_pos_),
                  left.end());
      out_.insert(out_.end(), right.begin() + static_cast<std::ptrdiff_t>(right_pos_),
                  right.end());
      merged_.push_back(std::move(out_));
      out_.clear();
      left_pos_ = right_pos_ = 0;
      next_ += 2;
      continue;
    }
    if (next_ < runs_.size()) merged_.push_back(std::move(runs_[next_]));
    runs_ = std::move(merged_);
    merged_.clear();
    next_ = 0;
    if (runs_.size() <= 1) return;
  }
}

std::pair<int, int> MergeSortSchedule::query() const {
  if (done()) throw ContractError("merge sort already finished");
  return {runs_[next_][left_pos_], runs_[next_ + 1][right_pos_]};
}

void MergeSortSchedule::answer(int first) {
  const auto [a, b] = query();
  if (first == a) {
    out_.push_back(a);
    ++left_pos_;
  } else if (first == b) {
    out_.push_back(b);
    ++right_pos_;
  } else {
    throw InputError("merge sort answer is not one of the compared elements");
  }
  ++comparisons_;
  settle();
}

std::vector<int> MergeSortSchedule::order() const {
  std::vector<int> out;
  if (done()) {
    if (!runs_.empty()) out = runs_.front();
    return out;
  }
  for (const auto& r : merged_) out.insert(out.end(), r.begin(), r.end());
  out.insert(out.end(), out_.begin(), out_.end());
  const auto& left = runs_[next_];
  const auto& right = runs_[next_ + 1];
  out.insert(out.end(), left.begin() + static_cast<std::ptrdiff_t>(left_pos_), left.end());
  out.insert(out.end(), right.begin() + static_cast<std::ptrdiff_t>(right_pos_),
             right.end());
  for (std::size_t i = next_ + 2; i < runs_.size(); ++i) {
    out.insert(out.end(), runs_[i].begin(), runs_[i].end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Adversary

int Adversary::forced_mistakes() const {
  int count = 0;
  for (const Record& r : history_) {
    if (r.counted && r.prediction != r.declared) ++count;
  }
  return count;
}

namespace {

std::vector<int> shuffled_range(int n, std::uint64_t seed) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 0);
  SplitMix64 rng(seed);
  rng.shuffle(v);
  return v;
}

Round pair_round(int a, int b) {
  Round r;
  r.arrival = {std::min(a, b), std::max(a, b)};
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// MergeSortAdversary

MergeSortAdversary::MergeSortAdversary(int n, std::uint64_t seed)
    : n_(n), schedule_(shuffled_range(n, seed)) {
  if (n < 1) throw InputError("mergesort adversary needs n >= 1");
}

Round MergeSortAdversary::next_round() const {
  const auto [a, b] = schedule_.query();
  return pair_round(a, b);
}

Observation MergeSortAdversary::respond(const Observation& prediction) {
  const auto [a, b] = schedule_.query();
  const auto* w = std::get_if<WinnerSet>(&prediction);
  if (!w || w->winners.size() != 1 || (w->winners[0] != a && w->winners[0] != b)) {
    throw InputError("mergesort adversary: prediction must name one of the pair");
  }
  const int declared = w->winners[0] == a ? b : a;
  schedule_.answer(declared);
  Observation truth = WinnerSet{{declared}};
  history_.push_back({pair_round(a, b), prediction, truth, true});
  return truth;
}

Scenario MergeSortAdversary::extract_consistent_scenario() const {
  Scenario s;
  s.n = n_;
  s.m = 1;
  s.value_cap = 1;
  s.true_order = schedule_.order();
  s.valuation_class = ValuationClass::kSingleMinded;
  s.valuations.assign(n_, SingleMinded{{0}, 1});
  s.observation_kind = ObservationKind::kWinnerSet;
  return s;
}

// ---------------------------------------------------------------------------
// PairsAdversary

PairsAdversary::PairsAdversary(int n) : n_(n) {
  if (n < 2) throw InputError("pairs adversary needs n >= 2");
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pairs_.emplace_back(i, j);
  }
}

Round PairsAdversary::next_round() const {
  if (done()) throw ContractError("pairs adversary already finished");
  return pair_round(pairs_[next_].first, pairs_[next_].second);
}

Observation PairsAdversary::respond(const Observation& prediction) {
  const Round round = next_round();
  const auto [i, j] = pairs_[next_];
  const auto* w = std::get_if<WinnerSet>(&prediction);
  if (!w || w->winners.empty() || !is_subset(w->winners, round.arrival)) {
    throw InputError("pairs adversary: prediction must be one or both of the pair");
  }
  Observation truth;
  if (w->winners.size() == 2) {
    conflicts_.emplace_back(i, j);
    truth = WinnerSet{{i}};
  } else {
    truth = WinnerSet{{i, j}};
  }
  history_.push_back({round, prediction, truth, true});
  ++next_;
  return truth;
}

Scenario PairsAdversary::extract_consistent_scenario() const {
  Scenario s;
  s.n = n_;
  s.value_cap = 1;
  s.true_order.resize(n_);
  std::iota(s.true_order.begin(), s.true_order.end(), 0);
  s.valuation_class = ValuationClass::kSingleMinded;
  s.observation_kind = ObservationKind::kWinnerSet;
  std::vector<ItemSet> demand(n_);
  int item = 0;
  for (auto [a, b] : conflicts_) {
    demand[a].push_back(item);
    demand[b].push_back(item);
    ++item;
  }
  for (ItemSet& d : demand) {
    if (d.empty()) d.push_back(item++);
  }
  s.m = item;
  for (ItemSet& d : demand) {
    normalize(d);
    s.valuations.emplace_back(SingleMinded{d, 1});
  }
  return s;
}

// ---------------------------------------------------------------------------
// DummyBuyerAdversary

DummyBuyerAdversary::DummyBuyerAdversary(int n, int m, std::uint64_t seed)
    : n_(n), m_(m) {
  if (m < 2 || n <= m) throw InputError("dummy adversary needs n > m >= 2");
  SplitMix64 rng(seed);
  for (int t = m; t < n; ++t) {
    schedules_.emplace_back(shuffled_range(m, rng()));
  }
}

bool DummyBuyerAdversary::done() const {
  return warm_dummy_ >= m_ && current_ >= static_cast<int>(schedules_.size());
}

Round DummyBuyerAdversary::next_round() const {
  if (done()) throw ContractError("dummy adversary already finished");
  Round r;
  if (warm_dummy_ < m_) {
    r.arrival = {warm_dummy_};
    return r;
  }
  const auto [a, b] = schedules_[current_].query();
  for (int d = 0; d < m_; ++d) {
    if (d != a && d != b) r.arrival.push_back(d);
  }
  r.arrival.push_back(m_ + current_);
  return r;
}

Allocation DummyBuyerAdversary::dummy_allocation(const BuyerSet& arrival) const {
  Allocation out = empty_allocation(n_);
  for (BuyerId b : arrival) {
    if (b < m_) out.bundles[b] = {b};
  }
  return out;
}

Observation DummyBuyerAdversary::respond(const Observation& prediction) {
  const Round round = next_round();
  const auto* pred = std::get_if<Allocation>(&prediction);
  if (!pred || static_cast<int>(pred->bundles.size()) != n_) {
    throw InputError("dummy adversary: prediction must be an allocation over n buyers");
  }
  Allocation truth = dummy_allocation(round.arrival);

  if (warm_dummy_ < m_) {
    streak_ = *pred == truth ? streak_ + 1 : 0;
    ++warm_rounds_;
    if (streak_ >= kWarmupStreak || warm_rounds_ >= kWarmupCap) {
      ++warm_dummy_;
      streak_ = 0;
      warm_rounds_ = 0;
    }
    history_.push_back({round, prediction, truth, false});
    return truth;
  }

  const BuyerId t = m_ + current_;
  MergeSortSchedule& sched = schedules_[current_];
  const auto [a, b] = sched.query();
  const ItemSet& guess = pred->bundles[t];
  const int preferred = guess == ItemSet{a} ? b : a;
  truth.bundles[t] = {preferred};
  sched.answer(preferred);
  if (sched.done()) ++current_;
  history_.push_back({round, prediction, truth, true});
  return truth;
}

Scenario DummyBuyerAdversary::extract_consistent_scenario() const {
  Scenario s;
  s.n = n_;
  s.m = m_;
  s.value_cap = m_;
  s.true_order.resize(n_);
  std::iota(s.true_order.begin(), s.true_order.end(), 0);
  s.valuation_class = ValuationClass::kUnitDemand;
  s.observation_kind = ObservationKind::kAllocation;
  for (int d = 0; d < m_; ++d) {
    std::vector<int> v(m_, 0);
    v[d] = m_;
    s.valuations.emplace_back(UnitDemand{v});
  }
  for (const MergeSortSchedule& sched : schedules_) {
    std::vector<int> v(m_, 0);
    const std::vector<int> ranked = sched.order();
    for (int r = 0; r < m_; ++r) v[ranked[r]] = m_ - r;
    s.valuations.emplace_back(UnitDemand{v});
  }
  return s;
}

}  // namespace mechlearn
