// SPDX-License-Identifier: Apache-2.0

#ifndef MECHLAB_MATCHING_H_
#define MECHLAB_MATCHING_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mechlab/instance.h"

namespace mechlab {

// Facility index per agent plus the cached social cost.
struct Assignment {
  std::vector<std::size_t> assigned;
  double cost = 0.0;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

// Validates `assigned` against the instance (size, facility range,
// capacities) and fills in the cost. Throws kInvalidAssignment.
Assignment MakeAssignment(const Instance& inst, std::vector<std::size_t> assigned);

// Recomputes sum_i d(A_i, F_assigned(i)) after the same validation.
double SocialCost(const Instance& inst, const Assignment& a);

// Minimum social cost assignment. Agents sharing a point are collapsed into
// one supply node and facilities keep their capacities, which is the
// slot-expanded bipartite graph with identical slots merged. Solved with
// successive shortest augmenting paths under Johnson potentials. Among all
// optimal assignments the lexicographically smallest `assigned` array is
// returned.
Assignment Optimal(const Instance& inst);

// Optimal cost only; also merges coinciding facilities, so it stays cheap on
// instances with many unit-capacity copies of a few points.
double OptimalCost(const Instance& inst);

// Exhaustive oracle. Requires n <= 9 and at most 12 usable capacity slots
// (sum_j min(c_j, n)); throws kGuardExceeded otherwise. Returns the
// lexicographically first assignment attaining the minimum.
Assignment BruteForceOptimal(const Instance& inst);

inline constexpr std::size_t kBruteForceMaxAgents = 9;
inline constexpr std::int64_t kBruteForceMaxSlots = 12;

}  // namespace mechlab

#endif  // MECHLAB_MATCHING_H_
