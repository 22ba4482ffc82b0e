#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mechlearn/rng.hpp"
#include "mechlearn/types.hpp"

namespace mechlearn {

// Strict partial order over {0, ..., k-1} given by recorded constraints
// a > b ("a precedes b"). Constraints are kept as raw edges; reachability
// is answered by DFS over bitmasks, so k is limited to 64.
class PartialOrder {
 public:
  static constexpr int kMaxSize = 64;

  PartialOrder() = default;
  explicit PartialOrder(int size);

  int size() const { return size_; }
  bool feasible() const { return feasible_; }

  // Records a > b and reports whether the order is still acyclic. Once
  // infeasible it stays infeasible until reset(). Re-adding an edge is a
  // no-op. Throws InputError if a == b or either is out of range.
  bool add_constraint(int a, int b);

  void reset();

  bool has_edge(int a, int b) const { return (pred_[b] >> a) & 1U; }
  // True iff a > b follows from the recorded edges.
  bool implies(int a, int b) const;

  std::uint64_t predecessors(int x) const { return pred_[x]; }
  std::uint64_t successors(int x) const { return succ_[x]; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  // True iff `order` is a permutation of the ground set respecting every edge.
  bool is_extension(const std::vector<int>& order) const;

  // Deterministic extension (Kahn's algorithm, smallest index first).
  // Throws ContractError when infeasible.
  std::vector<int> topological_order() const;

  // Bumped on every change; samplers use it to detect stale caches.
  std::uint64_t version() const { return version_; }

 private:
  std::uint64_t reachable_from(int a) const;

  int size_ = 0;
  bool feasible_ = true;
  std::uint64_t version_ = 0;
  std::vector<std::uint64_t> pred_;
  std::vector<std::uint64_t> succ_;
  std::vector<std::pair<int, int>> edges_;
};

__extension__ typedef unsigned __int128 u128;

namespace detail {

// Open-addressing map from DP state key to count. Keys must not be ~0.
class StateTable {
 public:
  const u128* find(std::uint64_t key) const;
  void insert(std::uint64_t key, u128 value);
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  void clear();

 private:
  std::size_t slot(std::uint64_t key) const;
  void grow();

  std::vector<std::uint64_t> keys_;
  std::vector<u128> values_;
  std::size_t size_ = 0;
};

}  // namespace detail

// Exact-mode guard for count/sample: 20! < 2^64.
inline constexpr int kExactMaxElements = 20;

// Number of linear extensions; 0 iff infeasible.
// Throws CapabilityError when size() > kExactMaxElements.
std::uint64_t count_linear_extensions(const PartialOrder& po);

// Exactly uniform linear extension by sequential choice of a minimal
// element weighted by the extension count of the residual order, with
// counts memoised per downset. Throws ContractError when infeasible and
// CapabilityError above kExactMaxElements.
std::vector<int> sample_linear_extension_exact(const PartialOrder& po,
                                               SplitMix64& rng);

// Lazy adjacent-transposition walk started from topological_order(): each
// step holds with probability 1/2, otherwise proposes swapping a uniformly
// chosen adjacent pair and accepts iff the result is still an extension.
std::vector<int> sample_linear_extension_mcmc(const PartialOrder& po,
                                              SplitMix64& rng,
                                              std::int64_t steps);

struct SamplerOptions {
  enum class Mode { kExact, kMcmc, kAuto };
  Mode mode = Mode::kAuto;
  // kAuto: a connected component is sampled exactly when it has at most
  // 34 elements (34! < 2^128) and its counting DP needs at most this many
  // states.
  std::size_t downset_budget = std::size_t{1} << 18;
  // MCMC steps for a component of k elements; 0 means 10 * k^3.
  std::int64_t mcmc_steps = 0;
};

// Reusable sampler for one state of a partial order.
//
// In kAuto mode the order is split into connected components. A uniform
// extension of a disjoint union is a uniformly random interleaving of
// independent uniform extensions of the parts. Each component is further
// cut into ordinal-sum pieces (everything in one piece precedes everything
// in the next), which concatenate. Every piece that fits the DP budget is
// sampled exactly and only oversized ones fall back to MCMC.
class LinearExtensionSampler {
 public:
  LinearExtensionSampler() = default;
  LinearExtensionSampler(const PartialOrder& po, SamplerOptions options = {});

  std::vector<int> sample(SplitMix64& rng) const;

  // True when every draw is exactly uniform.
  bool exact() const;
  std::uint64_t version() const { return version_; }

  // Extension count when every component was counted exactly and the
  // product fits in 128 bits.
  std::optional<u128> count() const;

 private:
  // Elements with identical strict predecessor and successor sets in the
  // transitive closure are interchangeable, so the exact engine counts
  // words over twin classes and multiplies by the class factorials. The
  // DP state is the number of placed elements per class in mixed radix.
  struct Component {
    int group = 0;              // connected component it belongs to
    std::vector<int> elements;  // local index -> global element
    std::vector<std::uint64_t> local_pred;
    bool exact = false;
    std::vector<std::vector<int>> classes;  // local indices per twin class
    std::vector<std::uint64_t> class_pred;  // over class indices
    std::vector<std::uint64_t> radix;
    u128 class_factor = 1;                  // product of class sizes!
    detail::StateTable memo;                // state -> word count
    std::int64_t mcmc_steps = 0;
  };

  static void build_classes(Component& c);
  static std::vector<int> sample_component(const Component& c, SplitMix64& rng);

  SamplerOptions options_;
  std::uint64_t version_ = 0;
  std::vector<Component> components_;
};

// First member of `available` under one freshly sampled extension.
// Throws ContractError when infeasible, InputError when `available` is empty.
int predict_top(const PartialOrder& po, const std::vector<int>& available,
                SplitMix64& rng, SamplerOptions options = {});

// Same, reusing a prepared sampler.
int predict_top(const LinearExtensionSampler& sampler,
                const std::vector<int>& available, SplitMix64& rng);

// Single-item priority learner: sample one consistent extension of the
// constraints seen so far and predict the first arrival under it. After a
// mistake with true winner w, record w > j for every other arrival j.
class SingleItemHalving {
 public:
  struct Step {
    BuyerId prediction = -1;
    bool mistake = false;
    // Constraints (winner, other) newly recorded.
    std::vector<std::pair<int, int>> added;
  };

  explicit SingleItemHalving(int n, SamplerOptions options = {});

  int size() const { return order_.size(); }
  const PartialOrder& order() const { return order_; }
  const LinearExtensionSampler& sampler() const;

  BuyerId predict(const BuyerSet& arrival, SplitMix64& rng) const;

  // Predicts with `rng`, then learns from `winner` if given. Throws
  // ContractError if the constraints become cyclic, which only happens
  // when the environment is not driven by a fixed total order.
  Step step(const BuyerSet& arrival, std::optional<BuyerId> winner,
            SplitMix64& rng);

  // Learns from a known prediction/winner pair without sampling.
  std::vector<std::pair<int, int>> learn(const BuyerSet& arrival,
                                         BuyerId predicted, BuyerId winner);

 private:
  PartialOrder order_;
  SamplerOptions options_;
  mutable std::optional<LinearExtensionSampler> cache_;
};

}  // namespace mechlearn
