// SPDX-License-Identifier: Apache-2.0

#ifndef MECHLAB_ERROR_H_
#define MECHLAB_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace mechlab {

enum class ErrorCode {
  kInvalidPoint,
  kInvalidFactor,
  kInvalidParameter,
  kSchema,
  kCapacitySum,
  kMetricViolation,
  kInfeasible,
  kInvalidAssignment,
  kInvalidOrdering,
  kGuardExceeded,
  kStructural,
  kNonChain,
  kMalformedTree,
  kConstructionDegenerate,
  kInvalidCovering,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// callers (and the CLI exit path) can tell them apart without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mechlab

#endif  // MECHLAB_ERROR_H_
