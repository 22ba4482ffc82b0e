#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mechlearn/learner.hpp"
#include "mechlearn/level_order.hpp"

namespace mechlearn {

// Integer bounds [lo, hi] on each v_i(e), initially [0, V].
class IntervalBox {
 public:
  IntervalBox() = default;
  IntervalBox(int n, int m, int value_cap);

  int lo(BuyerId i, ItemId e) const { return lo_.at(index(i, e)); }
  int hi(BuyerId i, ItemId e) const { return hi_.at(index(i, e)); }
  bool empty(BuyerId i, ItemId e) const { return lo(i, e) > hi(i, e); }
  // floor((lo + hi) / 2); the interval must be nonempty.
  int estimate(BuyerId i, ItemId e) const;

  // Return the new bound.
  int raise_lo(BuyerId i, ItemId e, int bound);
  int lower_hi(BuyerId i, ItemId e, int bound);

  bool any_empty(BuyerId i) const;
  void reset(BuyerId i);

 private:
  std::size_t index(BuyerId i, ItemId e) const {
    return static_cast<std::size_t>(i) * m_ + e;
  }

  int m_ = 0;
  int value_cap_ = 0;
  std::vector<int> lo_;
  std::vector<int> hi_;
};

// Additive buyers under posted prices: per-(buyer, item) binary search on
// the value, driven by the first mistaken buyer of each round.
class AdditiveVariableLearner : public OnlineLearner {
 public:
  AdditiveVariableLearner(int n, int m, int value_cap);
  AdditiveVariableLearner(int n, int m, int value_cap, std::vector<BuyerId> tiebreak);

  std::string name() const override { return "additive_variable"; }
  ObservationKind observation_kind() const override {
    return ObservationKind::kAllocation;
  }
  Observation predict(const Round& round) const override;
  std::vector<LearnerEvent> update(const Round& round,
                                   const Observation& truth) override;
  const LevelOrder* level_order() const override { return &order_; }

  const IntervalBox& intervals() const { return box_; }

 private:
  Allocation predict_allocation(const Round& round) const;

  int n_;
  int m_;
  int value_cap_;
  LevelOrder order_;
  IntervalBox box_;
  std::int64_t time_ = 0;
};

// Central-cut ellipsoid {x : (x - c)^T Q^{-1} (x - c) <= 1} for the
// feasibility search over one buyer's value vector.
//
// Starts as the ball around (V/2, ..., V/2) of radius (V+1) sqrt(m). A cut
// keeps {x : a.x >= a.c}:
//   g  = Q a / sqrt(a^T Q a)
//   c' = c + g / (m + 1)
//   Q' = m^2 / (m^2 - 1) (Q - 2 / (m + 1) g g^T)        (m >= 2)
//   Q' = Q / 4                                          (m = 1)
// The volume ratio det(Q') / det(Q) is (m^2/(m^2-1))^m (m-1)/(m+1), or 1/4
// for m = 1.
//
// Q is stored as B B^T and B is updated instead (Shor's form); rounding
// then sees cond(B) = sqrt(cond(Q)). det(Q) is measured from an LU of B.
//
// The learner relaxes each integer constraint by 1/2, so every consistent
// cut also keeps the cube v + (-1/4, 1/4)^m around the hidden vector v and
// a consistent ellipsoid never gets smaller than the radius-1/8 ball. Falling
// below that volume, exceeding the cut cap, or losing positive
// definiteness (a singular B) reports infeasible.
class Ellipsoid {
 public:
  Ellipsoid() = default;
  Ellipsoid(int m, int value_cap);

  // ceil(16 m^2 (log2(V+2) + log2(m+1) + 2)).
  static int cut_cap(int m, int value_cap);
  static double expected_det_ratio(int m);

  int dim() const { return m_; }
  const Eigen::VectorXd& center() const { return c_; }
  Eigen::MatrixXd shape() const;
  int cuts() const { return cuts_; }
  int cap() const { return cap_; }
  double log_det() const { return log_det_; }
  double min_log_det() const { return min_log_det_; }
  bool feasible() const { return feasible_; }
  // det(Q') / det(Q) measured on the last cut.
  double last_det_ratio() const { return last_ratio_; }

  // Applies the central cut for the constraint a.x >= b, which the current
  // center must not strictly satisfy (a.c <= b). Returns feasible(). Throws
  // InputError for a = 0 or a wrong dimension, ContractError when a.c > b.
  bool cut(const Eigen::VectorXd& a, double b);

  // (x - c)^T Q^{-1} (x - c), the squared ellipsoid norm of x.
  double norm2(const Eigen::VectorXd& x) const;
  bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const {
    return norm2(x) <= 1.0 + tol;
  }

  void reset();

 private:
  int m_ = 0;
  int value_cap_ = 0;
  int cap_ = 0;
  int cuts_ = 0;
  bool feasible_ = true;
  double log_det_ = 0.0;
  double min_log_det_ = 0.0;
  double last_ratio_ = 1.0;
  Eigen::VectorXd c_;
  Eigen::MatrixXd b_;  // Q = B B^T
};

// Unit-demand buyers under posted prices: one ellipsoid per buyer whose
// center is the value estimate; a buyer takes its best item when the
// estimated utility exceeds 1/2. The first mistaken buyer's ellipsoid is
// cut by the constraint its true choice implies, relaxed by 1/2; an infeasible ellipsoid
// demotes the buyer and restarts its search.
class UnitVariableLearner : public OnlineLearner {
 public:
  UnitVariableLearner(int n, int m, int value_cap);
  UnitVariableLearner(int n, int m, int value_cap, std::vector<BuyerId> tiebreak);

  std::string name() const override { return "unit_variable"; }
  ObservationKind observation_kind() const override {
    return ObservationKind::kAllocation;
  }
  Observation predict(const Round& round) const override;
  std::vector<LearnerEvent> update(const Round& round,
                                   const Observation& truth) override;
  const LevelOrder* level_order() const override { return &order_; }

  const Ellipsoid& ellipsoid(BuyerId i) const { return ellipsoids_.at(i); }

 private:
  Allocation predict_allocation(const Round& round) const;

  int n_;
  int m_;
  int value_cap_;
  LevelOrder order_;
  std::vector<Ellipsoid> ellipsoids_;
  std::int64_t time_ = 0;
};

}  // namespace mechlearn
