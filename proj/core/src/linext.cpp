#include "mechlearn/linext.hpp"

#include <bit>
#include <limits>
#include <map>
#include <numeric>
#include <string>

namespace mechlearn {

namespace {

constexpr std::uint64_t bit(int i) { return std::uint64_t{1} << i; }

constexpr int kWideMaxComponent = 34;  // 34! < 2^128

u128 below128(SplitMix64& rng, u128 bound) {
  if (bound <= std::numeric_limits<std::uint64_t>::max()) {
    return rng.below(static_cast<std::uint64_t>(bound));
  }
  const u128 threshold = (0 - bound) % bound;
  for (;;) {
    u128 r = (static_cast<u128>(rng()) << 64) | rng();
    if (r >= threshold) return r % bound;
  }
}

// Word counts over twin classes. A class may receive its next element
// once every predecessor class is complete.
struct ClassDp {
  const std::vector<std::vector<int>>& classes;
  const std::vector<std::uint64_t>& class_pred;
  const std::vector<std::uint64_t>& radix;
  detail::StateTable& memo;
  std::size_t budget = 0;
  bool over = false;
  std::vector<int> placed;
  std::uint64_t full = 0;
  int remaining = 0;

  ClassDp(const std::vector<std::vector<int>>& cls,
          const std::vector<std::uint64_t>& cpred,
          const std::vector<std::uint64_t>& rdx,
          detail::StateTable& m)
      : classes(cls), class_pred(cpred), radix(rdx), memo(m),
        placed(cls.size(), 0) {
    for (const auto& c : cls) remaining += static_cast<int>(c.size());
  }

  bool open(std::size_t c) const {
    return placed[c] < static_cast<int>(classes[c].size()) &&
           (class_pred[c] & ~full) == 0;
  }

  void push(std::size_t c) {
    if (++placed[c] == static_cast<int>(classes[c].size())) full |= bit(c);
    --remaining;
  }

  void pop(std::size_t c) {
    full &= ~bit(c);
    --placed[c];
    ++remaining;
  }

  u128 count(std::uint64_t key) {
    if (remaining == 0) return 1;
    if (const u128* hit = memo.find(key)) return *hit;
    u128 total = 0;
    for (std::size_t c = 0; c < classes.size(); ++c) {
      if (!open(c)) continue;
      push(c);
      total += count(key + radix[c]);
      pop(c);
      if (over) return 0;
    }
    memo.insert(key, total);
    if (memo.size() > budget) over = true;
    return total;
  }
};

std::vector<int> local_topological(const std::vector<std::uint64_t>& pred) {
  const int k = static_cast<int>(pred.size());
  std::vector<int> order;
  order.reserve(k);
  std::uint64_t placed = 0;
  while (static_cast<int>(order.size()) < k) {
    int pick = -1;
    for (int x = 0; x < k; ++x) {
      if (!(placed & bit(x)) && (pred[x] & ~placed) == 0) {
        pick = x;
        break;
      }
    }
    if (pick < 0) throw ContractError("partial order is infeasible");
    order.push_back(pick);
    placed |= bit(pick);
  }
  return order;
}

void lazy_walk(std::vector<int>& order, const std::vector<std::uint64_t>& pred,
               SplitMix64& rng, std::int64_t steps) {
  const int k = static_cast<int>(order.size());
  if (k < 2) return;
  const auto pairs = static_cast<std::uint64_t>(k - 1);
  for (std::int64_t s = 0; s < steps; ++s) {
    // One draw per step: low bit for the hold, high half scaled to a pair
    // index (bias below k / 2^32).
    const std::uint64_t r = rng();
    const auto pos = static_cast<std::size_t>(((r >> 32) * pairs) >> 32);
    const int x = order[pos];
    const int y = order[pos + 1];
    // Adjacent in a valid extension, so x > y can only be a direct edge.
    // Written without branches: both coin flips are unpredictable.
    const bool move = !(r & 1U) && !((pred[y] >> x) & 1U);
    order[pos] = move ? y : x;
    order[pos + 1] = move ? x : y;
  }
}

u128 binomial(int a, int b) {
  u128 r = 1;
  for (int i = 0; i < b; ++i) r = r * static_cast<u128>(a - i) / static_cast<u128>(i + 1);
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// StateTable

namespace detail {

constexpr std::uint64_t kEmptyKey = ~std::uint64_t{0};

std::size_t StateTable::slot(std::uint64_t key) const {
  const std::size_t mask = keys_.size() - 1;
  std::size_t i = static_cast<std::size_t>((key * 0x9e3779b97f4a7c15ULL) >> 20) & mask;
  while (keys_[i] != key && keys_[i] != kEmptyKey) i = (i + 1) & mask;
  return i;
}

const u128* StateTable::find(std::uint64_t key) const {
  if (keys_.empty()) return nullptr;
  std::size_t i = slot(key);
  return keys_[i] == key ? &values_[i] : nullptr;
}

void StateTable::insert(std::uint64_t key, u128 value) {
  if (2 * (size_ + 1) > keys_.size()) grow();
  std::size_t i = slot(key);
  if (keys_[i] == kEmptyKey) ++size_;
  keys_[i] = key;
  values_[i] = value;
}

void StateTable::clear() {
  keys_.clear();
  keys_.shrink_to_fit();
  values_.clear();
  values_.shrink_to_fit();
  size_ = 0;
}

void StateTable::grow() {
  std::vector<std::uint64_t> old_keys = std::move(keys_);
  std::vector<u128> old_values = std::move(values_);
  const std::size_t cap = old_keys.empty() ? 64 : 2 * old_keys.size();
  keys_.assign(cap, kEmptyKey);
  values_.assign(cap, 0);
  for (std::size_t i = 0; i < old_keys.size(); ++i) {
    if (old_keys[i] == kEmptyKey) continue;
    std::size_t j = slot(old_keys[i]);
    keys_[j] = old_keys[i];
    values_[j] = old_values[i];
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// PartialOrder

PartialOrder::PartialOrder(int size) : size_(size) {
  if (size < 0 || size > kMaxSize) {
    throw CapabilityError("PartialOrder supports at most 64 elements, got " +
                          std::to_string(size));
  }
  pred_.assign(size, 0);
  succ_.assign(size, 0);
}

void PartialOrder::reset() {
  feasible_ = true;
  pred_.assign(size_, 0);
  succ_.assign(size_, 0);
  edges_.clear();
  ++version_;
}

std::uint64_t PartialOrder::reachable_from(int a) const {
  std::uint64_t seen = 0;
  std::uint64_t frontier = succ_[a];
  while (frontier) {
    int x = std::countr_zero(frontier);
    frontier &= frontier - 1;
    if (seen & bit(x)) continue;
    seen |= bit(x);
    frontier |= succ_[x] & ~seen;
  }
  return seen;
}

bool PartialOrder::implies(int a, int b) const {
  return (reachable_from(a) >> b) & 1U;
}

bool PartialOrder::add_constraint(int a, int b) {
  if (a < 0 || a >= size_ || b < 0 || b >= size_) {
    throw InputError("add_constraint: element out of range");
  }
  if (a == b) throw InputError("add_constraint: a and b must differ");
  if (has_edge(a, b)) return feasible_;
  if (feasible_ && implies(b, a)) feasible_ = false;
  pred_[b] |= bit(a);
  succ_[a] |= bit(b);
  edges_.emplace_back(a, b);
  ++version_;
  return feasible_;
}

bool PartialOrder::is_extension(const std::vector<int>& order) const {
  if (static_cast<int>(order.size()) != size_) return false;
  std::uint64_t placed = 0;
  for (int x : order) {
    if (x < 0 || x >= size_ || (placed & bit(x))) return false;
    if ((pred_[x] & ~placed) != 0) return false;
    placed |= bit(x);
  }
  return true;
}

std::vector<int> PartialOrder::topological_order() const {
  if (!feasible_) throw ContractError("partial order is infeasible");
  return local_topological(pred_);
}

// ---------------------------------------------------------------------------
// LinearExtensionSampler

LinearExtensionSampler::LinearExtensionSampler(const PartialOrder& po,
                                               SamplerOptions options)
    : options_(options), version_(po.version()) {
  if (!po.feasible()) throw ContractError("partial order is infeasible");
  const int k = po.size();
  using Mode = SamplerOptions::Mode;
  if (options.mode == Mode::kExact && k > kExactMaxElements) {
    throw CapabilityError("exact sampling is limited to " +
                          std::to_string(kExactMaxElements) + " elements");
  }

  // Connected components are riffled together; kMcmc keeps a single group
  // to walk the whole order.
  std::vector<int> root(k);
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](int x) {
    while (root[x] != x) x = root[x] = root[root[x]];
    return x;
  };
  if (options.mode == Mode::kMcmc) {
    for (int x = 1; x < k; ++x) root[x] = 0;
  } else {
    for (auto [a, b] : po.edges()) root[find(a)] = find(b);
  }

  // Within a component, cut wherever everything before precedes everything
  // after; the pieces are then independent and concatenate.
  std::vector<std::uint64_t> closure(k, 0);
  const std::vector<int> topo = po.topological_order();
  for (int x : topo) {
    std::uint64_t p = po.predecessors(x);
    closure[x] = p;
    while (p) {
      int y = std::countr_zero(p);
      p &= p - 1;
      closure[x] |= closure[y];
    }
  }
  std::vector<std::vector<int>> groups;
  std::vector<int> slot(k, -1);
  for (int x : topo) {
    int r = find(x);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[slot[r]].push_back(x);
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::vector<int>& members = groups[g];
    std::size_t begin = 0;
    std::uint64_t prefix = 0;
    for (std::size_t i = 0; i < members.size(); ++i) {
      prefix |= bit(members[i]);
      bool cut = i + 1 == members.size();
      if (!cut && options.mode != Mode::kMcmc) {
        cut = true;
        for (std::size_t j = i + 1; j < members.size() && cut; ++j) {
          cut = (closure[members[j]] & prefix) == prefix;
        }
      }
      if (!cut) continue;
      Component& c = components_.emplace_back();
      c.group = static_cast<int>(g);
      c.elements.assign(members.begin() + static_cast<std::ptrdiff_t>(begin),
                        members.begin() + static_cast<std::ptrdiff_t>(i + 1));
      std::sort(c.elements.begin(), c.elements.end());
      begin = i + 1;
      prefix = 0;
    }
  }

  for (Component& c : components_) {
    const int kc = static_cast<int>(c.elements.size());
    std::vector<int> local(k, -1);
    std::uint64_t inside = 0;
    for (int i = 0; i < kc; ++i) {
      local[c.elements[i]] = i;
      inside |= bit(c.elements[i]);
    }
    c.local_pred.assign(kc, 0);
    for (int i = 0; i < kc; ++i) {
      std::uint64_t p = po.predecessors(c.elements[i]) & inside;
      while (p) {
        int g = std::countr_zero(p);
        p &= p - 1;
        c.local_pred[i] |= bit(local[g]);
      }
    }
    c.mcmc_steps = options.mcmc_steps > 0
                       ? options.mcmc_steps
                       : 10 * static_cast<std::int64_t>(kc) * kc * kc;
    if (options.mode == Mode::kMcmc) continue;

    const bool unlimited = options.mode == Mode::kExact;
    if (kc == 1 || (!unlimited && kc > kWideMaxComponent)) continue;
    build_classes(c);
    ClassDp dp(c.classes, c.class_pred, c.radix, c.memo);
    dp.budget = unlimited ? std::numeric_limits<std::size_t>::max()
                          : options.downset_budget;
    dp.count(0);
    if (dp.over) {
      c.memo.clear();
    } else {
      c.exact = true;
    }
  }
}

void LinearExtensionSampler::build_classes(Component& c) {
  const int kc = static_cast<int>(c.elements.size());
  std::vector<std::uint64_t> cpred(kc, 0);
  std::vector<std::uint64_t> csucc(kc, 0);
  for (int x : local_topological(c.local_pred)) {
    std::uint64_t p = c.local_pred[x];
    cpred[x] = p;
    while (p) {
      int y = std::countr_zero(p);
      p &= p - 1;
      cpred[x] |= cpred[y];
    }
  }
  for (int x = 0; x < kc; ++x) {
    std::uint64_t p = cpred[x];
    while (p) {
      int y = std::countr_zero(p);
      p &= p - 1;
      csucc[y] |= bit(x);
    }
  }
  std::map<std::pair<std::uint64_t, std::uint64_t>, int> index;
  std::vector<int> class_of(kc);
  for (int x = 0; x < kc; ++x) {
    auto [it, fresh] = index.try_emplace({cpred[x], csucc[x]},
                                         static_cast<int>(c.classes.size()));
    if (fresh) c.classes.emplace_back();
    c.classes[it->second].push_back(x);
    class_of[x] = it->second;
  }
  const std::size_t r = c.classes.size();
  c.class_pred.assign(r, 0);
  c.radix.assign(r, 1);
  c.class_factor = 1;
  for (std::size_t ci = 0; ci < r; ++ci) {
    std::uint64_t p = cpred[c.classes[ci].front()];
    while (p) {
      int y = std::countr_zero(p);
      p &= p - 1;
      c.class_pred[ci] |= bit(class_of[y]);
    }
    if (ci + 1 < r) c.radix[ci + 1] = c.radix[ci] * (c.classes[ci].size() + 1);
    for (std::size_t f = 2; f <= c.classes[ci].size(); ++f) c.class_factor *= f;
  }
}

bool LinearExtensionSampler::exact() const {
  for (const Component& c : components_) {
    if (!c.exact && c.elements.size() > 1) return false;
  }
  return true;
}

std::optional<u128> LinearExtensionSampler::count() const {
  u128 total = 1;
  int placed = 0;
  const u128 max = ~u128{0};
  for (std::size_t ci = 0; ci < components_.size();) {
    int size = 0;
    u128 ext = 1;
    const int group = components_[ci].group;
    for (; ci < components_.size() && components_[ci].group == group; ++ci) {
      const Component& c = components_[ci];
      size += static_cast<int>(c.elements.size());
      if (c.elements.size() == 1) continue;
      if (!c.exact) return std::nullopt;
      ext *= *c.memo.find(0) * c.class_factor;
    }
    if (placed + size > kWideMaxComponent) return std::nullopt;
    u128 ways = binomial(placed + size, size);
    if (total > max / ways) return std::nullopt;
    total *= ways;
    if (ext != 0 && total > max / ext) return std::nullopt;
    total *= ext;
    placed += size;
  }
  return total;
}

std::vector<int> LinearExtensionSampler::sample_component(const Component& c,
                                                          SplitMix64& rng) {
  const int kc = static_cast<int>(c.elements.size());
  std::vector<int> local;
  if (kc == 1) {
    local = {0};
  } else if (c.exact) {
    // Draw a word over classes, then hand out each class's members in a
    // uniformly shuffled order.
    detail::StateTable unused;
    ClassDp dp(c.classes, c.class_pred, c.radix, unused);
    auto words = [&](std::uint64_t key) -> u128 {
      return dp.remaining == 0 ? 1 : *c.memo.find(key);
    };
    std::vector<std::size_t> word;
    word.reserve(kc);
    std::uint64_t key = 0;
    while (dp.remaining > 0) {
      u128 r = below128(rng, words(key));
      for (std::size_t ci = 0; ci < c.classes.size(); ++ci) {
        if (!dp.open(ci)) continue;
        dp.push(ci);
        u128 w = words(key + c.radix[ci]);
        if (r < w) {
          word.push_back(ci);
          key += c.radix[ci];
          break;
        }
        dp.pop(ci);
        r -= w;
      }
    }
    std::vector<std::vector<int>> members = c.classes;
    for (auto& m : members) rng.shuffle(m);
    std::vector<std::size_t> next(members.size(), 0);
    local.reserve(kc);
    for (std::size_t ci : word) local.push_back(members[ci][next[ci]++]);
  } else {
    local = local_topological(c.local_pred);
    lazy_walk(local, c.local_pred, rng, c.mcmc_steps);
  }
  std::vector<int> out(local.size());
  for (std::size_t i = 0; i < local.size(); ++i) out[i] = c.elements[local[i]];
  return out;
}

std::vector<int> LinearExtensionSampler::sample(SplitMix64& rng) const {
  std::vector<std::vector<int>> parts;
  std::vector<int> labels;
  for (const Component& c : components_) {
    if (parts.empty() || c.group != components_[&c - components_.data() - 1].group) {
      parts.emplace_back();
    }
    std::vector<int> piece = sample_component(c, rng);
    parts.back().insert(parts.back().end(), piece.begin(), piece.end());
  }
  if (parts.size() == 1) return std::move(parts.front());
  for (std::size_t g = 0; g < parts.size(); ++g) {
    labels.insert(labels.end(), parts[g].size(), static_cast<int>(g));
  }
  rng.shuffle(labels);
  std::vector<std::size_t> next(parts.size(), 0);
  std::vector<int> out;
  out.reserve(labels.size());
  for (int g : labels) out.push_back(parts[g][next[g]++]);
  return out;
}

// ---------------------------------------------------------------------------
// Free functions

std::uint64_t count_linear_extensions(const PartialOrder& po) {
  if (po.size() > kExactMaxElements) {
    throw CapabilityError("exact counting is limited to " +
                          std::to_string(kExactMaxElements) + " elements");
  }
  if (!po.feasible()) return 0;
  LinearExtensionSampler s(po, {SamplerOptions::Mode::kExact});
  return static_cast<std::uint64_t>(*s.count());
}

std::vector<int> sample_linear_extension_exact(const PartialOrder& po,
                                               SplitMix64& rng) {
  if (!po.feasible()) throw ContractError("partial order is infeasible");
  LinearExtensionSampler s(po, {SamplerOptions::Mode::kExact});
  return s.sample(rng);
}

std::vector<int> sample_linear_extension_mcmc(const PartialOrder& po,
                                              SplitMix64& rng,
                                              std::int64_t steps) {
  if (!po.feasible()) throw ContractError("partial order is infeasible");
  std::vector<std::uint64_t> pred(po.size());
  for (int x = 0; x < po.size(); ++x) pred[x] = po.predecessors(x);
  std::vector<int> order = local_topological(pred);
  lazy_walk(order, pred, rng, steps);
  return order;
}

int predict_top(const LinearExtensionSampler& sampler,
                const std::vector<int>& available, SplitMix64& rng) {
  if (available.empty()) throw InputError("predict_top: nothing available");
  if (available.size() == 1) return available.front();
  std::uint64_t mask = 0;
  for (int x : available) mask |= bit(x);
  for (int x : sampler.sample(rng)) {
    if (mask & bit(x)) return x;
  }
  throw InputError("predict_top: available elements outside the ground set");
}

int predict_top(const PartialOrder& po, const std::vector<int>& available,
                SplitMix64& rng, SamplerOptions options) {
  if (available.empty()) throw InputError("predict_top: nothing available");
  for (int x : available) {
    if (x < 0 || x >= po.size()) throw InputError("predict_top: element out of range");
  }
  LinearExtensionSampler s(po, options);
  return predict_top(s, available, rng);
}

// ---------------------------------------------------------------------------
// SingleItemHalving

SingleItemHalving::SingleItemHalving(int n, SamplerOptions options)
    : order_(n), options_(options) {}

const LinearExtensionSampler& SingleItemHalving::sampler() const {
  if (!cache_ || cache_->version() != order_.version()) {
    cache_.emplace(order_, options_);
  }
  return *cache_;
}

BuyerId SingleItemHalving::predict(const BuyerSet& arrival, SplitMix64& rng) const {
  if (arrival.empty()) throw InputError("single-item round with no arrivals");
  for (BuyerId b : arrival) {
    if (b < 0 || b >= size()) throw InputError("arrival buyer out of range");
  }
  return predict_top(sampler(), arrival, rng);
}

std::vector<std::pair<int, int>> SingleItemHalving::learn(const BuyerSet& arrival,
                                                          BuyerId predicted,
                                                          BuyerId winner) {
  if (!contains(arrival, winner)) throw InputError("winner did not arrive");
  std::vector<std::pair<int, int>> added;
  if (predicted == winner) return added;
  for (BuyerId j : arrival) {
    if (j == winner || order_.has_edge(winner, j)) continue;
    order_.add_constraint(winner, j);
    added.emplace_back(winner, j);
  }
  if (!order_.feasible()) {
    throw ContractError(
        "single-item constraints became cyclic: environment has no fixed priority");
  }
  return added;
}

SingleItemHalving::Step SingleItemHalving::step(const BuyerSet& arrival,
                                                std::optional<BuyerId> winner,
                                                SplitMix64& rng) {
  Step out;
  out.prediction = predict(arrival, rng);
  if (winner && *winner != out.prediction) {
    out.mistake = true;
    out.added = learn(arrival, out.prediction, *winner);
  }
  return out;
}

}  // namespace mechlearn
