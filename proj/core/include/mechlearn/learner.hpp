#pragma once

#include <string>
#include <vector>

#include "mechlearn/level_order.hpp"
#include "mechlearn/types.hpp"

namespace mechlearn {

// One internal state change reported by a learner during update().
//
// Field use by kind (unused fields stay -1 / 0):
//   kDemoted          buyer (and item for a ghost buyer)
//   kEdgeDeleted      buyer, other (item / other_item for ghosts)
//   kBitSet           buyer, item
//   kDemandLearned    buyer
//   kConstraintAdded  buyer, item preferred over other_item (-1 = no purchase)
//   kOrderConstraint  buyer preferred over other
//   kIntervalCut      buyer, item, value = new bound, other = 0 for lo, 1 for hi
//   kEllipsoidCut     buyer
//   kReset            buyer
struct LearnerEvent {
  enum class Kind {
    kDemoted,
    kEdgeDeleted,
    kBitSet,
    kDemandLearned,
    kConstraintAdded,
    kOrderConstraint,
    kIntervalCut,
    kEllipsoidCut,
    kReset,
  };

  Kind kind = Kind::kDemoted;
  int buyer = -1;
  int item = -1;
  int other = -1;
  int other_item = -1;
  long value = 0;

  bool operator==(const LearnerEvent&) const = default;
};

// Compact token used in trace CSVs, e.g. "demote:b3", "edge:b1-b2",
// "bit:b1:i2", "constraint:b1:i2>none", "cut:b1:i2:lo=5".
std::string to_token(const LearnerEvent& event);
const char* kind_name(LearnerEvent::Kind kind);

// Online learner contract. predict() has no side effects: two calls with no
// update() in between return the same observation. update() recomputes the
// prediction it would have made, compares it with `truth`, and learns only
// from a mistake.
class OnlineLearner {
 public:
  virtual ~OnlineLearner() = default;

  virtual std::string name() const = 0;
  virtual ObservationKind observation_kind() const = 0;

  virtual Observation predict(const Round& round) const = 0;
  virtual std::vector<LearnerEvent> update(const Round& round,
                                           const Observation& truth) = 0;

  // Priority estimate, when the learner keeps one over buyers (or ghosts).
  virtual const LevelOrder* level_order() const { return nullptr; }
};

}  // namespace mechlearn
