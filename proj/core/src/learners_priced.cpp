#include "mechlearn/learners_priced.hpp"

#include <cmath>
#include <numeric>

#include "learner_util.hpp"

namespace mechlearn {

using internal::check_arrival;
using internal::check_prices;
using internal::event;
using internal::expect_allocation;
using Kind = LearnerEvent::Kind;

namespace {

std::vector<BuyerId> identity(int n) {
  std::vector<BuyerId> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// IntervalBox

IntervalBox::IntervalBox(int n, int m, int value_cap)
    : m_(m), value_cap_(value_cap),
      lo_(static_cast<std::size_t>(n) * m, 0),
      hi_(static_cast<std::size_t>(n) * m, value_cap) {
  if (n < 0 || m < 1 || value_cap < 1) throw InputError("IntervalBox: bad dimensions");
}

int IntervalBox::estimate(BuyerId i, ItemId e) const {
  if (empty(i, e)) throw ContractError("estimate of an empty interval");
  return (lo(i, e) + hi(i, e)) / 2;
}

int IntervalBox::raise_lo(BuyerId i, ItemId e, int bound) {
  int& l = lo_.at(index(i, e));
  l = std::max(l, bound);
  return l;
}

int IntervalBox::lower_hi(BuyerId i, ItemId e, int bound) {
  int& h = hi_.at(index(i, e));
  h = std::min(h, bound);
  return h;
}

bool IntervalBox::any_empty(BuyerId i) const {
  for (ItemId e = 0; e < m_; ++e) {
    if (empty(i, e)) return true;
  }
  return false;
}

void IntervalBox::reset(BuyerId i) {
  for (ItemId e = 0; e < m_; ++e) {
    lo_.at(index(i, e)) = 0;
    hi_.at(index(i, e)) = value_cap_;
  }
}

// ---------------------------------------------------------------------------
// AdditiveVariableLearner

AdditiveVariableLearner::AdditiveVariableLearner(int n, int m, int value_cap)
    : AdditiveVariableLearner(n, m, value_cap, identity(n)) {}

AdditiveVariableLearner::AdditiveVariableLearner(int n, int m, int value_cap,
                                                 std::vector<BuyerId> tiebreak)
    : n_(n), m_(m), value_cap_(value_cap), order_(std::move(tiebreak)),
      box_(n, m, value_cap) {
  if (order_.size() != n) throw InputError("tiebreak length differs from n");
}

Allocation AdditiveVariableLearner::predict_allocation(const Round& round) const {
  check_arrival(round, n_);
  const std::vector<int>& p = check_prices(round, m_);
  Allocation out{std::vector<ItemSet>(n_)};
  std::vector<char> taken(m_, 0);
  for (BuyerId i : order_.order_subset(round.arrival)) {
    for (ItemId e = 0; e < m_; ++e) {
      if (taken[e] || box_.estimate(i, e) <= p[e]) continue;
      taken[e] = 1;
      out.bundles[i].push_back(e);
    }
  }
  return out;
}

Observation AdditiveVariableLearner::predict(const Round& round) const {
  return predict_allocation(round);
}

std::vector<LearnerEvent> AdditiveVariableLearner::update(const Round& round,
                                                          const Observation& truth) {
  const Allocation predicted = predict_allocation(round);
  const Allocation& actual = expect_allocation(truth, round, n_, m_);
  const std::vector<int>& p = *round.prices;
  const std::int64_t t = time_++;
  std::vector<LearnerEvent> events;
  const auto first = order_.first_mistake(actual, predicted);
  if (!first) return events;

  const BuyerId i = *first;
  auto record = [&](ItemId e, int side, int bound) {
    LearnerEvent ev = event(Kind::kIntervalCut, i);
    ev.item = e;
    ev.other = side;
    ev.value = bound;
    events.push_back(ev);
  };
  for (ItemId e : set_minus(actual.bundles[i], predicted.bundles[i])) {
    record(e, 0, box_.raise_lo(i, e, p[e] + 1));
  }
  for (ItemId e : set_minus(predicted.bundles[i], actual.bundles[i])) {
    record(e, 1, box_.lower_hi(i, e, p[e]));
  }
  if (box_.any_empty(i)) {
    order_.demote(i, t);
    events.push_back(event(Kind::kDemoted, i));
    box_.reset(i);
    events.push_back(event(Kind::kReset, i));
  }
  return events;
}

// ---------------------------------------------------------------------------
// Ellipsoid

Ellipsoid::Ellipsoid(int m, int value_cap)
    : m_(m), value_cap_(value_cap), cap_(cut_cap(m, value_cap)) {
  if (m < 1 || value_cap < 1) throw InputError("Ellipsoid: bad dimensions");
  min_log_det_ = 2.0 * m * std::log(1.0 / 8.0);
  reset();
}

int Ellipsoid::cut_cap(int m, int value_cap) {
  const double bits = std::log2(value_cap + 2.0) + std::log2(m + 1.0) + 2.0;
  return static_cast<int>(std::ceil(16.0 * m * m * bits));
}

double Ellipsoid::expected_det_ratio(int m) {
  if (m == 1) return 0.25;
  const double mm = static_cast<double>(m) * m;
  return std::pow(mm / (mm - 1.0), m) * (m - 1.0) / (m + 1.0);
}

void Ellipsoid::reset() {
  const double r = (value_cap_ + 1.0) * std::sqrt(static_cast<double>(m_));
  c_ = Eigen::VectorXd::Constant(m_, value_cap_ / 2.0);
  b_ = Eigen::MatrixXd::Identity(m_, m_) * r;
  log_det_ = 2.0 * m_ * std::log(r);
  cuts_ = 0;
  feasible_ = true;
  last_ratio_ = 1.0;
}

Eigen::MatrixXd Ellipsoid::shape() const { return b_ * b_.transpose(); }

bool Ellipsoid::cut(const Eigen::VectorXd& a, double b) {
  if (a.size() != m_) throw InputError("cut: constraint has the wrong dimension");
  if (a.isZero(0.0)) throw InputError("cut: zero constraint vector");
  if (a.dot(c_) > b) {
    throw ContractError("cut: the center strictly satisfies the constraint");
  }
  if (!feasible_) return false;

  // Q a / sqrt(a^T Q a) = B w with w = B^T a / |B^T a|.
  const Eigen::VectorXd bta = b_.transpose() * a;
  const double len = bta.norm();
  if (!(len > 0.0) || !std::isfinite(len)) {
    feasible_ = false;
    return false;
  }
  const Eigen::VectorXd w = bta / len;
  const Eigen::VectorXd g = b_ * w;
  const double m = m_;
  c_ += g / (m + 1.0);
  if (m_ == 1) {
    b_ /= 2.0;
  } else {
    // B' (B')^T = m^2/(m^2-1) (Q - (2beta - beta^2) g g^T), 2beta - beta^2 = 2/(m+1).
    const double alpha = m / std::sqrt(m * m - 1.0);
    const double beta = 1.0 - std::sqrt((m - 1.0) / (m + 1.0));
    b_ = alpha * (b_ - beta * g * w.transpose());
  }
  ++cuts_;

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(b_);
  const Eigen::VectorXd diag = lu.matrixLU().diagonal().cwiseAbs();
  if (!(diag.minCoeff() > 0.0) || !diag.allFinite()) {
    feasible_ = false;
    return false;
  }
  const double next = 2.0 * diag.array().log().sum();
  last_ratio_ = std::exp(next - log_det_);
  log_det_ = next;
  if (cuts_ > cap_ || log_det_ < min_log_det_) feasible_ = false;
  return feasible_;
}

double Ellipsoid::norm2(const Eigen::VectorXd& x) const {
  return b_.partialPivLu().solve(x - c_).squaredNorm();
}

// ---------------------------------------------------------------------------
// UnitVariableLearner

UnitVariableLearner::UnitVariableLearner(int n, int m, int value_cap)
    : UnitVariableLearner(n, m, value_cap, identity(n)) {}

UnitVariableLearner::UnitVariableLearner(int n, int m, int value_cap,
                                         std::vector<BuyerId> tiebreak)
    : n_(n), m_(m), value_cap_(value_cap), order_(std::move(tiebreak)),
      ellipsoids_(n, Ellipsoid(m, value_cap)) {
  if (order_.size() != n) throw InputError("tiebreak length differs from n");
}

Allocation UnitVariableLearner::predict_allocation(const Round& round) const {
  check_arrival(round, n_);
  const std::vector<int>& p = check_prices(round, m_);
  Allocation out{std::vector<ItemSet>(n_)};
  std::vector<char> taken(m_, 0);
  for (BuyerId i : order_.order_subset(round.arrival)) {
    const Eigen::VectorXd& c = ellipsoids_[i].center();
    int best = -1;
    double best_utility = 0.0;
    for (ItemId e = 0; e < m_; ++e) {
      if (taken[e]) continue;
      const double u = c[e] - p[e];
      if (best < 0 || u > best_utility) {
        best = e;
        best_utility = u;
      }
    }
    // Integer utilities are positive exactly when above 1/2; the same
    // threshold keeps every cut below central.
    if (best < 0 || best_utility <= 0.5) continue;
    taken[best] = 1;
    out.bundles[i] = {best};
  }
  return out;
}

Observation UnitVariableLearner::predict(const Round& round) const {
  return predict_allocation(round);
}

std::vector<LearnerEvent> UnitVariableLearner::update(const Round& round,
                                                      const Observation& truth) {
  const Allocation predicted = predict_allocation(round);
  const Allocation& actual = expect_allocation(truth, round, n_, m_);
  const std::vector<int>& p = *round.prices;
  const std::int64_t t = time_++;
  std::vector<LearnerEvent> events;
  const auto first = order_.first_mistake(actual, predicted);
  if (!first) return events;

  const BuyerId i = *first;
  if (actual.bundles[i].size() > 1) {
    throw InputError("unit-demand truth gives buyer " + std::to_string(i) +
                     " more than one item");
  }
  const int j = actual.bundles[i].empty() ? -1 : actual.bundles[i].front();
  const int jhat = predicted.bundles[i].empty() ? -1 : predicted.bundles[i].front();
  Eigen::VectorXd a = Eigen::VectorXd::Zero(m_);
  double b = 0.0;
  // Each integer constraint is relaxed by 1/2 so the consistent region
  // keeps a ball of radius 1/4 around v.
  if (j < 0) {
    // Bought nothing: v(jhat) <= p(jhat).
    a[jhat] = -1.0;
    b = -p[jhat] - 0.5;
  } else if (jhat < 0) {
    // Bought j although we predicted nothing: v(j) >= p(j) + 1.
    a[j] = 1.0;
    b = p[j] + 0.5;
  } else {
    // Preferred j to jhat: v(j) - v(jhat) >= p(j) - p(jhat) + 1.
    a[j] = 1.0;
    a[jhat] = -1.0;
    b = p[j] - p[jhat] + 0.5;
  }
  Ellipsoid& ell = ellipsoids_[i];
  const bool ok = ell.cut(a, b);
  events.push_back(event(Kind::kEllipsoidCut, i));
  if (!ok) {
    order_.demote(i, t);
    events.push_back(event(Kind::kDemoted, i));
    ell.reset();
    events.push_back(event(Kind::kReset, i));
  }
  return events;
}

}  // namespace mechlearn
