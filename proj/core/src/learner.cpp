#include "mechlearn/learner.hpp"

namespace mechlearn {

namespace {

std::string agent(int buyer, int item) {
  std::string s = "b" + std::to_string(buyer);
  if (item >= 0) s += "i" + std::to_string(item);
  return s;
}

std::string item_or_none(int item) {
  return item < 0 ? std::string("none") : "i" + std::to_string(item);
}

}  // namespace

const char* kind_name(LearnerEvent::Kind kind) {
  using K = LearnerEvent::Kind;
  switch (kind) {
    case K::kDemoted: return "demote";
    case K::kEdgeDeleted: return "edge";
    case K::kBitSet: return "bit";
    case K::kDemandLearned: return "demand";
    case K::kConstraintAdded: return "constraint";
    case K::kOrderConstraint: return "order";
    case K::kIntervalCut: return "cut";
    case K::kEllipsoidCut: return "ellipsoid";
    case K::kReset: return "reset";
  }
  return "?";
}

std::string to_token(const LearnerEvent& e) {
  using K = LearnerEvent::Kind;
  std::string out = kind_name(e.kind);
  out += ':';
  switch (e.kind) {
    case K::kDemoted:
      out += agent(e.buyer, e.item);
      break;
    case K::kEdgeDeleted:
      out += agent(e.buyer, e.item) + "-" + agent(e.other, e.other_item);
      break;
    case K::kBitSet:
      out += agent(e.buyer, -1) + ":i" + std::to_string(e.item);
      break;
    case K::kConstraintAdded:
      out += agent(e.buyer, -1) + ":" + item_or_none(e.item) + ">" +
             item_or_none(e.other_item);
      break;
    case K::kOrderConstraint:
      out += agent(e.buyer, -1) + ">" + agent(e.other, -1);
      break;
    case K::kIntervalCut:
      out += agent(e.buyer, -1) + ":i" + std::to_string(e.item) +
             (e.other == 0 ? ":lo=" : ":hi=") + std::to_string(e.value);
      break;
    case K::kDemandLearned:
    case K::kEllipsoidCut:
    case K::kReset:
      out += agent(e.buyer, -1);
      break;
  }
  return out;
}

}  // namespace mechlearn
