#include "powerlab/error.hpp"

namespace powerlab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::invalid_argument: return "InvalidArgument";
  case ErrorKind::disjointness_violation: return "DisjointnessViolation";
  case ErrorKind::empty_set: return "EmptySet";
  case ErrorKind::invalid_alpha: return "InvalidAlpha";
  case ErrorKind::exhausted: return "Exhausted";
  case ErrorKind::too_short: return "TooShort";
  case ErrorKind::endpoint_mismatch: return "EndpointMismatch";
  case ErrorKind::overlap_violation: return "OverlapViolation";
  case ErrorKind::length_mismatch: return "LengthMismatch";
  case ErrorKind::not_permutation: return "NotPermutation";
  case ErrorKind::too_large: return "TooLarge";
  case ErrorKind::invalid_endpoint: return "InvalidEndpoint";
  case ErrorKind::wrong_construction: return "WrongConstruction";
  case ErrorKind::range_violation: return "RangeViolation";
  case ErrorKind::no_common_neighbor_class: return "NoCommonNeighborClass";
  case ErrorKind::not_absorbable: return "NotAbsorbable";
  case ErrorKind::infeasible_params: return "InfeasibleParams";
  case ErrorKind::parse_error: return "ParseError";
  case ErrorKind::invalid_path: return "InvalidPath";
  case ErrorKind::io_error: return "IoError";
  case ErrorKind::not_found: return "NotFound";
  case ErrorKind::budget_exceeded: return "BudgetExceeded";
  case ErrorKind::precondition_failed: return "PreconditionFailed";
  }
  return "Unknown";
}

} // namespace powerlab
