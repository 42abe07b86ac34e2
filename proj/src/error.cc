// SPDX-License-Identifier: Apache-2.0

#include "mechlab/error.h"

namespace mechlab {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidPoint: return "invalid-point";
    case ErrorCode::kInvalidFactor: return "invalid-factor";
    case ErrorCode::kInvalidParameter: return "invalid-parameter";
    case ErrorCode::kSchema: return "schema";
    case ErrorCode::kCapacitySum: return "capacity-sum";
    case ErrorCode::kMetricViolation: return "metric-violation";
    case ErrorCode::kInfeasible: return "infeasible";
    case ErrorCode::kInvalidAssignment: return "invalid-assignment";
    case ErrorCode::kInvalidOrdering: return "invalid-ordering";
    case ErrorCode::kGuardExceeded: return "guard-exceeded";
    case ErrorCode::kStructural: return "structural";
    case ErrorCode::kNonChain: return "non-chain";
    case ErrorCode::kMalformedTree: return "malformed-tree";
    case ErrorCode::kConstructionDegenerate: return "construction-degenerate";
    case ErrorCode::kInvalidCovering: return "invalid-covering";
  }
  return "unknown";
}

}  // namespace mechlab
