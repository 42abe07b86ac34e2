// SPDX-License-Identifier: Apache-2.0

// Path coverings of directed g-trees: nonnegative weights x_p on
// leaf-originating paths with
//   sum_{p crossing e_r} x_p >= 1                    (root edge)
//   sum_{p ending at e} x_p - sum_{p through e and its parent} x_p >= 1
// for every other edge. The cost is the largest crossing sum over edges.

#ifndef MECHLAB_COVERING_H_
#define MECHLAB_COVERING_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mechlab/gtree.h"
#include "mechlab/rational.h"

namespace mechlab {

// Weights of the listed paths; unlisted tree paths weigh zero.
template <typename T>
struct BasicPathCovering {
  std::vector<TreePath> paths;
  std::vector<T> weights;
};

using ExactCovering = BasicPathCovering<Rational>;
using RealCovering = BasicPathCovering<double>;

inline constexpr double kRealCoveringTolerance = 1e-9;

struct CoveringViolation {
  enum class Kind { kNegativeWeight, kRootConstraint, kEdgeConstraint };
  Kind kind;
  std::size_t edge;  // offending edge; leaf edge of the path for weights
  double value;      // weight, or left-hand side of the violated constraint

  std::string Describe() const;
};

// Crossing sums sum_{p through e} x_p per edge. Throw kInvalidCovering when a
// listed path is not a path of `t` or is listed twice.
std::vector<Rational> CrossingSums(const DirectedGTree& t, const ExactCovering& x);
std::vector<double> CrossingSums(const DirectedGTree& t, const RealCovering& x);

// Sums over the paths that end at e.
std::vector<Rational> TerminatingSums(const DirectedGTree& t, const ExactCovering& x);
std::vector<double> TerminatingSums(const DirectedGTree& t, const RealCovering& x);

Rational Cost(const DirectedGTree& t, const ExactCovering& x);
double Cost(const DirectedGTree& t, const RealCovering& x);

// First violation in edge order (weights first), exact for rationals and
// within kRealCoveringTolerance for reals.
std::optional<CoveringViolation> Validate(const DirectedGTree& t,
                                          const ExactCovering& x);
std::optional<CoveringViolation> Validate(const DirectedGTree& t,
                                          const RealCovering& x);

// Weight 2^(i-1) on the path ending at the depth-i edge; cost 2^E - 1.
// Throws kNonChain unless every node has in-degree <= 1.
ExactCovering ConstructG1(const DirectedGTree& t);

// For paths of length l: g^(2-l) / (g-2) when ending at the root edge,
// (g-1) g^(1-l) / (g-2) otherwise. Cost exactly g / (g-2). Throws
// kMalformedTree unless t.g() >= 3.
ExactCovering ConstructG3Plus(const DirectedGTree& t);

// Bottom-up redistribution starting from y = log2 N on leaf edges. Throws
// kMalformedTree unless t.g() == 2 and kConstructionDegenerate when a child
// edge's open temporary mass is <= 1.
RealCovering ConstructG2(const DirectedGTree& t);

// Nodes of the subtree hanging from each edge, the edge's upper node
// included (2 for leaf edges).
std::vector<std::size_t> SubtreeNodeCounts(const DirectedGTree& t);

struct DualityReport {
  double sd_cost;
  double opt_cost;
  double covering_cost;
  bool holds;  // sd_cost <= covering_cost * opt_cost + 1e-9
};

// Throws kInvalidCovering when x is not a path covering of t.
DualityReport DualityBoundCheck(const DirectedGTree& t, const ExactCovering& x);
DualityReport DualityBoundCheck(const DirectedGTree& t, const RealCovering& x);

}  // namespace mechlab

#endif  // MECHLAB_COVERING_H_
