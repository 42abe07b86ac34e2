// SPDX-License-Identifier: Apache-2.0

// Representation graphs of (instance, optimal, SD) triplets and their
// reduction to directed g-trees.
//
// Facilities are split into unit slots that coincide on the metric; under
// augmentation g every slot hosts up to g agents in S and one in O. An agent
// that O and S place at the same facility keeps one slot in both (a
// self-loop). The remaining S agents fill the lowest slot with room in
// arrival order, which is SD on the split instance with a particular choice
// among coinciding copies, and the remaining O agents take the free slots
// by agent index. Nodes are slots and the edge of agent i goes from its O
// slot to its S slot.

#ifndef MECHLAB_GTREE_H_
#define MECHLAB_GTREE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mechlab/instance.h"
#include "mechlab/matching.h"
#include "mechlab/mechanisms.h"
#include "mechlab/metric.h"

namespace mechlab {

struct RepNode {
  std::size_t facility;  // original facility index
  std::size_t slot;
  PointId point;
};

struct RepEdge {
  std::size_t agent;
  std::size_t from;  // O slot
  std::size_t to;    // S slot
  double opt_dist;
  double sd_dist;
};

struct RepGraph {
  std::int64_t g = 1;
  std::vector<RepNode> nodes;
  std::vector<RepEdge> edges;  // indexed by agent; self-loops included
};

// `opt` must be valid for `inst`, `sd` for Augment(inst, g), both with the
// same number of agents as `order`; throws kInvalidAssignment otherwise.
RepGraph BuildRepGraph(const Instance& inst, const Assignment& opt,
                       const Assignment& sd, const Ordering& order,
                       std::int64_t g);

struct TreeNode {
  PointId point;
  std::size_t facility;  // original facility this node descends from
};

struct TreeEdge {
  std::size_t agent;
  PointId agent_point;
  std::size_t from;
  std::size_t to;
  double opt_dist;
  double sd_dist;
};

// Why (nodes, edges) fails to be a directed g-tree, or nullopt.
std::optional<std::string> GTreeDiagnostic(std::int64_t g,
                                           std::span<const TreeNode> nodes,
                                           std::span<const TreeEdge> edges);

// Root node has in-degree 1 and out-degree 0, leaves in-degree 0 and
// out-degree 1, every other node in-degree g and out-degree 1; acyclic and
// connected. Edge indices are local; `agent` keeps the original index.
class DirectedGTree {
 public:
  // Throws kMalformedTree unless the invariants hold.
  static DirectedGTree FromEdges(std::int64_t g, std::vector<TreeNode> nodes,
                                 std::vector<TreeEdge> edges);

  // Shape-only tree: parent[e] is the parent edge of e, or -1 for the root
  // edge. Nodes get point 0 and distances are zero.
  static DirectedGTree FromParents(std::int64_t g,
                                   std::span<const std::int64_t> parent);

  std::int64_t g() const { return g_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_nodes() const { return nodes_.size(); }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const std::vector<TreeEdge>& edges() const { return edges_; }

  std::size_t root_node() const { return root_node_; }
  std::size_t root_edge() const { return root_edge_; }
  // -1 for the root edge.
  std::int64_t parent(std::size_t e) const { return parent_[e]; }
  const std::vector<std::size_t>& children(std::size_t e) const {
    return children_[e];
  }
  bool is_leaf_edge(std::size_t e) const { return children_[e].empty(); }
  // The root edge has depth 1.
  std::size_t depth(std::size_t e) const { return depth_[e]; }
  // Children before parents; children visited in ascending index.
  const std::vector<std::size_t>& post_order() const { return post_order_; }
  // Leaf edges in ascending index.
  const std::vector<std::size_t>& leaf_edges() const { return leaves_; }

  double sd_cost() const;
  double opt_cost() const;

 private:
  DirectedGTree() = default;

  std::int64_t g_ = 1;
  std::vector<TreeNode> nodes_;
  std::vector<TreeEdge> edges_;
  std::size_t root_node_ = 0;
  std::size_t root_edge_ = 0;
  std::vector<std::int64_t> parent_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> depth_;
  std::vector<std::size_t> post_order_;
  std::vector<std::size_t> leaves_;
};

// A leaf-originating path: the leaf edge followed by its first `length - 1`
// ancestors, ending at `end_edge`.
struct TreePath {
  std::size_t leaf_edge;
  std::size_t end_edge;
  std::size_t length;

  friend bool operator==(const TreePath&, const TreePath&) = default;
};

// Canonical order: by leaf edge ascending, then by length ascending.
std::vector<TreePath> EnumeratePaths(const DirectedGTree& t);

// Edges of `p` from the leaf upwards.
std::vector<std::size_t> PathEdges(const DirectedGTree& t, const TreePath& p);

struct Forest {
  std::int64_t g = 1;
  Metric metric;  // original points plus every coinciding copy
  std::vector<DirectedGTree> trees;
  std::size_t passes = 0;
};

// Surgery on a triplet: drop optimal agents, classify the rest
// as greedy or blocked by replaying SD occupancy, redirect blocked agents
// that point at a greedy agent's O slot to a fresh coinciding node, drop
// greedy agents that do not feed a blocked agent's O slot, split shared
// unused-in-O nodes into fresh roots and drop unused nodes. Components whose
// O is not optimal for their own unit-capacity instance are re-optimized and
// reduced again, at most n passes in total. Throws kStructural if a
// component breaks the g-tree invariants or the pass cap is hit.
Forest Reduce(const RepGraph& rg, const Instance& inst, const Ordering& order);

// BuildRepGraph + Reduce with O = Optimal(inst) and S = SD on Augment(inst, g).
Forest ReduceTriplet(const Instance& inst, const Ordering& order, std::int64_t g);

// Unit-capacity instance of one tree: nodes become facilities of capacity 1.
Instance TreeInstance(const Forest& forest, const DirectedGTree& t);

struct PrimalViolation {
  std::size_t edge;
  TreePath path;
  double lhs;  // sd_dist(e)
  double rhs;  // opt_dist(e) + sum over the rest of sd_dist + opt_dist
};

// sd_dist(e) <= opt_dist(e) + sum_{a in p \ e} (sd_dist(a) + opt_dist(a)) for
// every path p terminating at e, up to 1e-9 relative.
std::optional<PrimalViolation> CheckPrimalConstraints(const DirectedGTree& t);

// sd / opt of a tree; +inf when opt is zero and sd positive, NaN for 0/0.
double TreeRatio(const DirectedGTree& t);

// When the triplet ratio exceeds 1, some component must reach it: the
// largest tree ratio is >= sc_sd / sc_opt - 1e-9. Ratios <= 1 hold
// vacuously.
bool RatioMonotone(const Forest& forest, double sc_sd, double sc_opt);

}  // namespace mechlab

#endif  // MECHLAB_GTREE_H_
