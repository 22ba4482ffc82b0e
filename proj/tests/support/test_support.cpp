#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace mltest {

std::vector<std::vector<int>> all_extensions(const PartialOrder& po) {
  std::vector<int> perm(po.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    bool ok = true;
    for (auto [a, b] : po.edges()) {
      const auto pa = std::find(perm.begin(), perm.end(), a);
      const auto pb = std::find(perm.begin(), perm.end(), b);
      if (pa > pb) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

std::uint64_t brute_count(const PartialOrder& po) { return all_extensions(po).size(); }

PartialOrder random_poset(int k, double p, SplitMix64& rng) {
  std::vector<int> hidden(k);
  std::iota(hidden.begin(), hidden.end(), 0);
  rng.shuffle(hidden);
  PartialOrder po(k);
  for (int x = 0; x < k; ++x) {
    for (int y = x + 1; y < k; ++y) {
      if (rng.bernoulli(p)) po.add_constraint(hidden[x], hidden[y]);
    }
  }
  return po;
}

namespace {

// Closure as an adjacency bitmask per element, over the natural labelling
// (edges only go from a smaller to a larger index).
using Closure = std::vector<std::uint32_t>;

bool closed(const Closure& succ) {
  for (std::size_t a = 0; a < succ.size(); ++a) {
    for (std::size_t b = 0; b < succ.size(); ++b) {
      if ((succ[a] >> b & 1U) && (succ[b] & ~succ[a])) return false;
    }
  }
  return true;
}

std::string canonical(const Closure& succ) {
  const int k = static_cast<int>(succ.size());
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::string best;
  do {
    std::string code(static_cast<std::size_t>(k) * k, '0');
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        if (succ[a] >> b & 1U) code[perm[a] * k + perm[b]] = '1';
      }
    }
    if (best.empty() || code < best) best = code;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

std::vector<PartialOrder> unlabeled_posets(int k) {
  std::vector<std::pair<int, int>> slots;
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) slots.emplace_back(a, b);
  }
  std::set<std::string> seen;
  std::vector<PartialOrder> out;
  for (std::uint32_t mask = 0; mask < (1U << slots.size()); ++mask) {
    Closure succ(k, 0);
    for (std::size_t s = 0; s < slots.size(); ++s) {
      if (mask >> s & 1U) succ[slots[s].first] |= 1U << slots[s].second;
    }
    if (!closed(succ) || !seen.insert(canonical(succ)).second) continue;
    PartialOrder po(k);
    for (auto [a, b] : slots) {
      if (succ[a] >> b & 1U) po.add_constraint(a, b);
    }
    out.push_back(po);
  }
  return out;
}

namespace {

// Regularised incomplete gamma functions, series and continued fraction
// forms (Numerical Recipes, 6.2).
double gamma_p_series(double a, double x) {
  double sum = 1.0 / a;
  double term = sum;
  for (int n = 1; n < 1000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_fraction(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double chi_square_pvalue(double x, int df) {
  if (x <= 0) return 1.0;
  const double a = df / 2.0;
  const double h = x / 2.0;
  return h < a + 1.0 ? 1.0 - gamma_p_series(a, h) : gamma_q_fraction(a, h);
}

std::vector<int> true_positions(const Scenario& s) {
  std::vector<int> pos(s.n);
  for (int k = 0; k < s.n; ++k) pos[s.true_order[k]] = k;
  return pos;
}

bool true_conflict(const Scenario& s, BuyerId a, BuyerId b) {
  return intersects(std::get<SingleMinded>(s.valuations[a]).demand_set,
                    std::get<SingleMinded>(s.valuations[b]).demand_set);
}

std::vector<int> ghost_true_positions(const Scenario& s) {
  std::vector<int> ghosts(static_cast<std::size_t>(s.n) * s.m);
  std::iota(ghosts.begin(), ghosts.end(), 0);
  const std::vector<int> pos = true_positions(s);
  auto value = [&](int g) {
    return std::get<UnitDemand>(s.valuations[g / s.m]).values[g % s.m];
  };
  std::sort(ghosts.begin(), ghosts.end(), [&](int x, int y) {
    if (pos[x / s.m] != pos[y / s.m]) return pos[x / s.m] < pos[y / s.m];
    if (value(x) != value(y)) return value(x) > value(y);
    return x < y;
  });
  std::vector<int> out(ghosts.size());
  for (std::size_t k = 0; k < ghosts.size(); ++k) out[ghosts[k]] = static_cast<int>(k);
  return out;
}

bool justified(const std::vector<int>& perm, const std::vector<int>& true_pos, int i) {
  const auto at = std::find(perm.begin(), perm.end(), i);
  return std::any_of(at + 1, perm.end(), [&](int r) { return true_pos[r] < true_pos[i]; });
}

GeneratorParams random_params(SplitMix64& rng, ValuationClass c, PriceMode mode,
                              ObservationKind kind, const ParamRange& range) {
  GeneratorParams g;
  g.n = rng.between(range.n_lo, range.n_hi);
  g.m = rng.between(range.m_lo, range.m_hi);
  g.value_cap = range.value_cap;
  g.valuation_class = c;
  g.price_mode = mode;
  g.observation_kind = kind;
  if (c == ValuationClass::kSingleMinded) {
    // Varying demand sizes give sparse to dense conflict graphs.
    g.min_demand = 1;
    g.max_demand = rng.between(1, g.m);
  }
  g.value_density = 0.3 + 0.6 * rng.uniform01();
  return g;
}

Scenario random_scenario_for(LearnerKind kind, SplitMix64& rng, const ParamRange& range) {
  ValuationClass c = ValuationClass::kSingleMinded;
  PriceMode mode = PriceMode::kFixed;
  ObservationKind obs = ObservationKind::kAllocation;
  ParamRange r = range;
  switch (kind) {
    case LearnerKind::kWinners: obs = ObservationKind::kWinnerSet; break;
    case LearnerKind::kSingleMindedAlloc: break;
    case LearnerKind::kAdditiveFixed: c = ValuationClass::kAdditive; break;
    case LearnerKind::kUnitDemandGhost:
    case LearnerKind::kUnitDemandPrime: c = ValuationClass::kUnitDemand; break;
    case LearnerKind::kSingleItem:
      obs = ObservationKind::kWinnerSet;
      r.m_lo = r.m_hi = 1;
      break;
    case LearnerKind::kAdditiveVariable:
      c = ValuationClass::kAdditive;
      mode = PriceMode::kVariable;
      break;
    case LearnerKind::kUnitVariable:
      c = ValuationClass::kUnitDemand;
      mode = PriceMode::kVariable;
      break;
  }
  GeneratorParams g = random_params(rng, c, mode, obs, r);
  if (kind == LearnerKind::kUnitDemandGhost) g.positive_values = true;
  return gen_random_scenario(rng(), g);
}

// ---------------------------------------------------------------------------
// SoundnessMonitor

SoundnessMonitor::SoundnessMonitor(const Scenario& s, LearnerKind kind, double det_tol)
    : s_(s), kind_(kind), det_tol_(det_tol), tainted_(s.n, 0) {
  true_pos_ = kind == LearnerKind::kUnitDemandGhost ? ghost_true_positions(s)
                                                    : true_positions(s);
}

RunHooks SoundnessMonitor::hooks() {
  RunHooks h;
  h.before_update = [this](const Round& r, const OnlineLearner& l) { before(r, l); };
  h.after_update = [this](const TraceRecord& rec, const OnlineLearner& l) { after(rec, l); };
  return h;
}

void SoundnessMonitor::fail(const std::string& what) {
  if (failures_.size() < 20) failures_.push_back(what);
}

void SoundnessMonitor::before(const Round&, const OnlineLearner& learner) {
  perm_before_.clear();
  if (const LevelOrder* order = learner.level_order()) perm_before_ = order->current_perm();
}

void SoundnessMonitor::after(const TraceRecord& rec, const OnlineLearner& learner) {
  const std::string at = "t=" + std::to_string(rec.t) + ": ";
  const Allocation* truth = std::get_if<Allocation>(&rec.truth);
  const Allocation* predicted = std::get_if<Allocation>(&rec.predicted);
  auto taken_by_other = [&](BuyerId i, ItemId e) {
    if (!truth || e < 0) return false;
    for (BuyerId b = 0; b < s_.n; ++b) {
      if (b != i && contains(truth->bundles[b], e)) return true;
    }
    return false;
  };
  std::vector<char> cut_then_reset(s_.n, 0);

  for (const LearnerEvent& e : rec.events) {
    switch (e.kind) {
      case LearnerEvent::Kind::kDemoted: {
        ++checks_;
        const int id = kind_ == LearnerKind::kUnitDemandGhost ? e.buyer * s_.m + e.item : e.buyer;
        if (!perm_before_.empty() && !justified(perm_before_, true_pos_, id)) {
          fail(at + "unjustified demotion " + to_token(e));
        }
        break;
      }
      case LearnerEvent::Kind::kEdgeDeleted: {
        ++checks_;
        bool real = false;
        if (kind_ == LearnerKind::kUnitDemandGhost) {
          real = e.buyer == e.other || e.item == e.other_item;
        } else {
          real = true_conflict(s_, e.buyer, e.other);
        }
        if (real) fail(at + "deleted a true conflict " + to_token(e));
        break;
      }
      case LearnerEvent::Kind::kIntervalCut:
        if (e.other == 1 && taken_by_other(e.buyer, e.item)) tainted_[e.buyer] = 1;
        break;
      case LearnerEvent::Kind::kEllipsoidCut: {
        const ItemSet& mine = predicted->bundles[e.buyer];
        if (!mine.empty() && taken_by_other(e.buyer, mine.front())) tainted_[e.buyer] = 1;
        break;
      }
      case LearnerEvent::Kind::kReset:
        tainted_[e.buyer] = 0;
        cut_then_reset[e.buyer] = 1;
        break;
      default:
        break;
    }
  }

  if (kind_ == LearnerKind::kAdditiveVariable) {
    const auto& l = dynamic_cast<const AdditiveVariableLearner&>(learner);
    for (BuyerId i = 0; i < s_.n; ++i) {
      if (tainted_[i]) continue;
      const auto& v = std::get<Additive>(s_.valuations[i]).values;
      for (ItemId j = 0; j < s_.m; ++j) {
        ++checks_;
        const int lo = l.intervals().lo(i, j), hi = l.intervals().hi(i, j);
        if (v[j] < lo || v[j] > hi) {
          std::ostringstream msg;
          msg << at << "v[" << i << "][" << j << "]=" << v[j] << " outside [" << lo << ", " << hi
              << "]";
          fail(msg.str());
        }
      }
    }
  } else if (kind_ == LearnerKind::kUnitVariable) {
    const auto& l = dynamic_cast<const UnitVariableLearner&>(learner);
    for (const LearnerEvent& e : rec.events) {
      if (e.kind != LearnerEvent::Kind::kEllipsoidCut || cut_then_reset[e.buyer]) continue;
      const double want = Ellipsoid::expected_det_ratio(s_.m);
      const double err = std::abs(l.ellipsoid(e.buyer).last_det_ratio() - want) / want;
      worst_det_error_ = std::max(worst_det_error_, err);
      ++cuts_;
      if (err > det_tol_) {
        fail(at + "determinant ratio off by " + std::to_string(err));
      }
    }
    for (BuyerId i = 0; i < s_.n; ++i) {
      if (tainted_[i]) continue;
      const auto& v = std::get<UnitDemand>(s_.valuations[i]).values;
      Eigen::VectorXd x(s_.m);
      for (ItemId j = 0; j < s_.m; ++j) x[j] = v[j];
      ++checks_;
      if (!l.ellipsoid(i).contains(x)) {
        fail(at + "buyer " + std::to_string(i) + " values left the ellipsoid");
      }
    }
  }
}

}  // namespace mltest
