// SPDX-License-Identifier: Apache-2.0

#include "mechlab/gtree.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "mechlab/error.h"

namespace mechlab {
namespace {

double RelTol(double v) { return 1e-9 * std::max(1.0, std::abs(v)); }

// A triplet restricted to some agents: node points plus one edge per agent
// (from = O node, to = S node).
struct Work {
  std::vector<TreeNode> nodes;
  std::vector<TreeEdge> agents;
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t Find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void Union(std::size_t a, std::size_t b) {
    a = Find(a);
    b = Find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

std::size_t AddCoincidingNode(Work& w, Metric& metric, std::size_t of) {
  auto [extended, point] = ExtendWithCoincidingPoint(metric, w.nodes[of].point);
  metric = std::move(extended);
  w.nodes.push_back(TreeNode{point, w.nodes[of].facility});
  return w.nodes.size() - 1;
}

enum class Kind { kOptimal, kGreedy, kBlocked };

// One round of surgery; returns the components, each already checked
// against the g-tree invariants.
std::vector<Work> ReducePass(Work w, std::int64_t g, Metric& metric,
                             const std::vector<std::size_t>& position) {
  const std::size_t num_agents = w.agents.size();

  // Replay SD occupancy of every node along the ordering. Optimal agents
  // count towards occupancy.
  std::vector<std::size_t> by_turn(num_agents);
  std::iota(by_turn.begin(), by_turn.end(), std::size_t{0});
  std::sort(by_turn.begin(), by_turn.end(), [&](std::size_t a, std::size_t b) {
    return position[w.agents[a].agent] < position[w.agents[b].agent];
  });
  std::vector<std::int64_t> occupancy(w.nodes.size(), 0);
  std::vector<Kind> kind(num_agents);
  for (const std::size_t a : by_turn) {
    const TreeEdge& e = w.agents[a];
    if (e.from == e.to) {
      kind[a] = Kind::kOptimal;
    } else {
      kind[a] = occupancy[e.from] < g ? Kind::kGreedy : Kind::kBlocked;
    }
    if (++occupancy[e.to] > g) {
      throw Error(ErrorCode::kStructural,
                  "node " + std::to_string(e.to) + " receives more than g agents");
    }
  }

  std::vector<bool> greedy_o(w.nodes.size(), false);
  std::vector<bool> blocked_o(w.nodes.size(), false);
  for (std::size_t a = 0; a < num_agents; ++a) {
    if (kind[a] == Kind::kGreedy) greedy_o[w.agents[a].from] = true;
    if (kind[a] == Kind::kBlocked) blocked_o[w.agents[a].from] = true;
  }

  for (std::size_t a = 0; a < num_agents; ++a) {
    if (kind[a] == Kind::kBlocked && greedy_o[w.agents[a].to]) {
      w.agents[a].to = AddCoincidingNode(w, metric, w.agents[a].to);
    }
  }

  std::vector<TreeEdge> kept;
  for (std::size_t a = 0; a < num_agents; ++a) {
    if (kind[a] == Kind::kOptimal) continue;
    if (kind[a] == Kind::kGreedy && !blocked_o[w.agents[a].to]) continue;
    kept.push_back(w.agents[a]);
  }
  w.agents = std::move(kept);

  // Nodes unused in O but shared in S become one fresh root per S-user.
  {
    const std::size_t before = w.nodes.size();
    std::vector<std::size_t> o_users(before, 0);
    std::vector<std::vector<std::size_t>> s_users(before);
    for (std::size_t a = 0; a < w.agents.size(); ++a) {
      ++o_users[w.agents[a].from];
      s_users[w.agents[a].to].push_back(a);
    }
    for (std::size_t v = 0; v < before; ++v) {
      if (o_users[v] != 0 || s_users[v].size() < 2) continue;
      for (const std::size_t a : s_users[v]) {
        w.agents[a].to = AddCoincidingNode(w, metric, v);
      }
    }
  }

  // Components over used nodes.
  UnionFind uf(w.nodes.size());
  std::vector<bool> used(w.nodes.size(), false);
  for (const TreeEdge& e : w.agents) {
    used[e.from] = used[e.to] = true;
    uf.Union(e.from, e.to);
  }
  std::vector<std::size_t> comp_of(w.nodes.size(), 0);
  std::vector<std::size_t> local(w.nodes.size(), 0);
  std::vector<Work> out;
  std::vector<std::size_t> comp_index(w.nodes.size(), SIZE_MAX);
  for (std::size_t v = 0; v < w.nodes.size(); ++v) {
    if (!used[v]) continue;
    const std::size_t r = uf.Find(v);
    if (comp_index[r] == SIZE_MAX) {
      comp_index[r] = out.size();
      out.emplace_back();
    }
    comp_of[v] = comp_index[r];
    local[v] = out[comp_of[v]].nodes.size();
    out[comp_of[v]].nodes.push_back(w.nodes[v]);
  }
  for (TreeEdge e : w.agents) {
    Work& c = out[comp_of[e.from]];
    e.from = local[e.from];
    e.to = local[e.to];
    c.agents.push_back(e);
  }
  for (std::size_t c = 0; c < out.size(); ++c) {
    if (auto diag = GTreeDiagnostic(g, out[c].nodes, out[c].agents)) {
      throw Error(ErrorCode::kStructural,
                  "reduced component " + std::to_string(c) +
                      " is not a directed g-tree: " + *diag);
    }
  }
  return out;
}

Instance UnitInstance(const Metric& metric, const Work& w) {
  std::vector<PointId> agents;
  agents.reserve(w.agents.size());
  for (const TreeEdge& e : w.agents) agents.push_back(e.agent_point);
  std::vector<PointId> facilities;
  facilities.reserve(w.nodes.size());
  for (const TreeNode& v : w.nodes) facilities.push_back(v.point);
  return Instance(metric, std::move(agents), std::move(facilities),
                  std::vector<std::int64_t>(w.nodes.size(), 1));
}

}  // namespace

RepGraph BuildRepGraph(const Instance& inst, const Assignment& opt,
                       const Assignment& sd, const Ordering& order,
                       std::int64_t g) {
  const Instance augmented = Augment(inst, g);
  MakeAssignment(inst, opt.assigned);
  MakeAssignment(augmented, sd.assigned);
  if (order.size() != inst.num_agents()) {
    throw Error(ErrorCode::kInvalidAssignment,
                "ordering and assignments disagree on the number of agents");
  }

  RepGraph rg;
  rg.g = g;
  std::vector<std::size_t> base(inst.num_facilities());
  for (std::size_t j = 0; j < inst.num_facilities(); ++j) {
    base[j] = rg.nodes.size();
    for (std::int64_t s = 0; s < inst.capacities()[j]; ++s) {
      rg.nodes.push_back(RepNode{j, static_cast<std::size_t>(s), inst.facilities()[j]});
    }
  }

  // Agents kept at one facility by both O and S each get a slot of their own
  // that serves them in both, so they become self-loops. Other S agents fill
  // the lowest slot with room in arrival order (SD may pick any coinciding
  // copy); other O agents take the unused slots in index order.
  const std::size_t n = inst.num_agents();
  std::vector<std::size_t> o_slot(n), s_slot(n);
  std::vector<std::size_t> kept(inst.num_facilities(), 0);
  for (const std::size_t i : order.perm()) {
    const std::size_t j = sd.assigned[i];
    if (opt.assigned[i] == j) o_slot[i] = s_slot[i] = base[j] + kept[j]++;
  }
  std::vector<std::int64_t> load(rg.nodes.size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (opt.assigned[i] == sd.assigned[i]) ++load[s_slot[i]];
  }
  std::vector<std::size_t> cursor(inst.num_facilities(), 0);
  for (const std::size_t i : order.perm()) {
    const std::size_t j = sd.assigned[i];
    if (opt.assigned[i] == j) continue;
    while (load[base[j] + cursor[j]] == g) ++cursor[j];
    s_slot[i] = base[j] + cursor[j];
    ++load[s_slot[i]];
  }
  std::vector<std::size_t> o_next(kept);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = opt.assigned[i];
    if (sd.assigned[i] != j) o_slot[i] = base[j] + o_next[j]++;
  }
  rg.edges.reserve(inst.num_agents());
  for (std::size_t i = 0; i < inst.num_agents(); ++i) {
    rg.edges.push_back(RepEdge{i, o_slot[i], s_slot[i], inst.cost(i, opt.assigned[i]),
                               inst.cost(i, sd.assigned[i])});
  }
  return rg;
}

std::optional<std::string> GTreeDiagnostic(std::int64_t g,
                                           std::span<const TreeNode> nodes,
                                           std::span<const TreeEdge> edges) {
  if (g < 1) return "g must be >= 1";
  if (edges.empty()) return "tree has no edges";
  if (nodes.size() != edges.size() + 1) {
    return "a tree with " + std::to_string(edges.size()) + " edges needs " +
           std::to_string(edges.size() + 1) + " nodes, got " +
           std::to_string(nodes.size());
  }
  std::vector<std::int64_t> in(nodes.size(), 0);
  std::vector<std::int64_t> out(nodes.size(), 0);
  std::vector<std::size_t> next(nodes.size(), SIZE_MAX);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& ed = edges[e];
    if (ed.from >= nodes.size() || ed.to >= nodes.size()) {
      return "edge " + std::to_string(e) + " references a missing node";
    }
    if (ed.from == ed.to) return "edge " + std::to_string(e) + " is a self-loop";
    ++out[ed.from];
    ++in[ed.to];
    next[ed.from] = ed.to;
  }
  std::size_t root = SIZE_MAX;
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    if (out[v] > 1) return "node " + std::to_string(v) + " has out-degree > 1";
    if (out[v] == 0) {
      if (root != SIZE_MAX) return "more than one node with out-degree 0";
      root = v;
      if (in[v] != 1) return "root node " + std::to_string(v) + " has in-degree " +
                             std::to_string(in[v]) + ", expected 1";
    } else if (in[v] != 0 && in[v] != g) {
      return "node " + std::to_string(v) + " has in-degree " + std::to_string(in[v]) +
             ", expected 0 or " + std::to_string(g);
    }
  }
  if (root == SIZE_MAX) return "no root node";
  // 0 = unvisited, 1 = on the current walk, 2 = reaches the root.
  std::vector<char> state(nodes.size(), 0);
  state[root] = 2;
  std::vector<std::size_t> walk;
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    std::size_t u = v;
    walk.clear();
    while (state[u] == 0) {
      state[u] = 1;
      walk.push_back(u);
      u = next[u];
    }
    if (state[u] == 1) return "cycle through node " + std::to_string(u);
    for (const std::size_t x : walk) state[x] = 2;
  }
  return std::nullopt;
}

DirectedGTree DirectedGTree::FromEdges(std::int64_t g, std::vector<TreeNode> nodes,
                                       std::vector<TreeEdge> edges) {
  if (auto diag = GTreeDiagnostic(g, nodes, edges)) {
    throw Error(ErrorCode::kMalformedTree, *diag);
  }
  DirectedGTree t;
  t.g_ = g;
  t.nodes_ = std::move(nodes);
  t.edges_ = std::move(edges);
  const std::size_t num_edges = t.edges_.size();

  std::vector<std::int64_t> out_edge(t.nodes_.size(), -1);
  std::vector<std::vector<std::size_t>> in_edges(t.nodes_.size());
  for (std::size_t e = 0; e < num_edges; ++e) {
    out_edge[t.edges_[e].from] = static_cast<std::int64_t>(e);
    in_edges[t.edges_[e].to].push_back(e);
  }
  for (std::size_t v = 0; v < t.nodes_.size(); ++v) {
    if (out_edge[v] < 0) t.root_node_ = v;
  }
  t.root_edge_ = in_edges[t.root_node_].front();
  t.parent_.resize(num_edges);
  t.children_.resize(num_edges);
  for (std::size_t e = 0; e < num_edges; ++e) {
    t.parent_[e] = out_edge[t.edges_[e].to];
    t.children_[e] = in_edges[t.edges_[e].from];
    if (t.children_[e].empty()) t.leaves_.push_back(e);
  }

  t.depth_.assign(num_edges, 0);
  t.post_order_.reserve(num_edges);
  std::vector<std::pair<std::size_t, std::size_t>> stack{{t.root_edge_, 0}};
  t.depth_[t.root_edge_] = 1;
  while (!stack.empty()) {
    auto& [e, next_child] = stack.back();
    if (next_child < t.children_[e].size()) {
      const std::size_t c = t.children_[e][next_child++];
      t.depth_[c] = t.depth_[e] + 1;
      stack.emplace_back(c, 0);
    } else {
      t.post_order_.push_back(e);
      stack.pop_back();
    }
  }
  return t;
}

DirectedGTree DirectedGTree::FromParents(std::int64_t g,
                                         std::span<const std::int64_t> parent) {
  const std::size_t num_edges = parent.size();
  std::vector<TreeNode> nodes(num_edges + 1);
  for (std::size_t v = 0; v < nodes.size(); ++v) nodes[v] = TreeNode{PointId{0}, v};
  std::vector<TreeEdge> edges(num_edges);
  for (std::size_t e = 0; e < num_edges; ++e) {
    if (parent[e] < -1 || parent[e] >= static_cast<std::int64_t>(num_edges)) {
      throw Error(ErrorCode::kMalformedTree,
                  "parent of edge " + std::to_string(e) + " out of range");
    }
    // Edge e leaves node e + 1; node 0 is the root.
    const std::size_t to = parent[e] < 0 ? 0 : static_cast<std::size_t>(parent[e]) + 1;
    edges[e] = TreeEdge{e, PointId{0}, e + 1, to, 0.0, 0.0};
  }
  return FromEdges(g, std::move(nodes), std::move(edges));
}

double DirectedGTree::sd_cost() const {
  double s = 0.0;
  for (const auto& e : edges_) s += e.sd_dist;
  return s;
}

double DirectedGTree::opt_cost() const {
  double s = 0.0;
  for (const auto& e : edges_) s += e.opt_dist;
  return s;
}

std::vector<TreePath> EnumeratePaths(const DirectedGTree& t) {
  std::vector<TreePath> paths;
  for (const std::size_t leaf : t.leaf_edges()) {
    std::size_t length = 1;
    for (std::int64_t e = static_cast<std::int64_t>(leaf); e >= 0; e = t.parent(e)) {
      paths.push_back(TreePath{leaf, static_cast<std::size_t>(e), length++});
    }
  }
  return paths;
}

std::vector<std::size_t> PathEdges(const DirectedGTree& t, const TreePath& p) {
  std::vector<std::size_t> out;
  out.reserve(p.length);
  std::int64_t e = static_cast<std::int64_t>(p.leaf_edge);
  for (std::size_t i = 0; i < p.length; ++i) {
    if (e < 0) throw Error(ErrorCode::kInvalidParameter, "path leaves the tree");
    out.push_back(static_cast<std::size_t>(e));
    e = t.parent(static_cast<std::size_t>(e));
  }
  if (out.back() != p.end_edge) {
    throw Error(ErrorCode::kInvalidParameter, "path end does not match its length");
  }
  return out;
}

Forest Reduce(const RepGraph& rg, const Instance& inst, const Ordering& order) {
  if (rg.edges.size() != inst.num_agents() || order.size() != inst.num_agents()) {
    throw Error(ErrorCode::kInvalidAssignment,
                "representation graph does not match the instance");
  }
  Forest forest{rg.g, inst.metric(), {}, 0};
  std::vector<std::size_t> position(inst.num_agents());
  for (std::size_t p = 0; p < order.size(); ++p) position[order.perm()[p]] = p;

  Work initial;
  for (const RepNode& v : rg.nodes) initial.nodes.push_back(TreeNode{v.point, v.facility});
  for (const RepEdge& e : rg.edges) {
    initial.agents.push_back(TreeEdge{e.agent, inst.agents()[e.agent], e.from, e.to,
                                      e.opt_dist, e.sd_dist});
  }

  const std::size_t cap = std::max<std::size_t>(1, inst.num_agents());
  std::deque<Work> pending;
  pending.push_back(std::move(initial));
  while (!pending.empty()) {
    Work w = std::move(pending.front());
    pending.pop_front();
    if (++forest.passes > cap) {
      throw Error(ErrorCode::kStructural,
                  "reduction did not settle within " + std::to_string(cap) + " passes");
    }
    for (Work& c : ReducePass(std::move(w), rg.g, forest.metric, position)) {
      const Instance unit = UnitInstance(forest.metric, c);
      double current = 0.0;
      for (const TreeEdge& e : c.agents) current += e.opt_dist;
      if (OptimalCost(unit) < current - RelTol(current)) {
        const Assignment better = Optimal(unit);
        for (std::size_t a = 0; a < c.agents.size(); ++a) {
          c.agents[a].from = better.assigned[a];
          c.agents[a].opt_dist = unit.cost(a, better.assigned[a]);
        }
        pending.push_back(std::move(c));
      } else {
        forest.trees.push_back(
            DirectedGTree::FromEdges(rg.g, std::move(c.nodes), std::move(c.agents)));
      }
    }
  }
  return forest;
}

Forest ReduceTriplet(const Instance& inst, const Ordering& order, std::int64_t g) {
  const Assignment opt = Optimal(inst);
  const Assignment sd = OnlineGreedy(inst, order, g);
  return Reduce(BuildRepGraph(inst, opt, sd, order, g), inst, order);
}

Instance TreeInstance(const Forest& forest, const DirectedGTree& t) {
  std::vector<PointId> agents;
  for (const TreeEdge& e : t.edges()) agents.push_back(e.agent_point);
  std::vector<PointId> facilities;
  for (const TreeNode& v : t.nodes()) facilities.push_back(v.point);
  return Instance(forest.metric, std::move(agents), std::move(facilities),
                  std::vector<std::int64_t>(t.num_nodes(), 1));
}

std::optional<PrimalViolation> CheckPrimalConstraints(const DirectedGTree& t) {
  for (const std::size_t leaf : t.leaf_edges()) {
    double below = 0.0;  // sum of sd + opt over the edges under e on the walk
    std::size_t length = 1;
    for (std::int64_t e = static_cast<std::int64_t>(leaf); e >= 0; e = t.parent(e)) {
      const TreeEdge& ed = t.edges()[e];
      const double rhs = ed.opt_dist + below;
      if (ed.sd_dist > rhs + RelTol(rhs)) {
        return PrimalViolation{static_cast<std::size_t>(e),
                               TreePath{leaf, static_cast<std::size_t>(e), length},
                               ed.sd_dist, rhs};
      }
      below += ed.sd_dist + ed.opt_dist;
      ++length;
    }
  }
  return std::nullopt;
}

double TreeRatio(const DirectedGTree& t) {
  const double sd = t.sd_cost();
  const double opt = t.opt_cost();
  if (opt == 0.0) {
    return sd == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                     : std::numeric_limits<double>::infinity();
  }
  return sd / opt;
}

bool RatioMonotone(const Forest& forest, double sc_sd, double sc_opt) {
  if (sc_opt == 0.0) return true;
  const double ratio = sc_sd / sc_opt;
  if (ratio <= 1.0) return true;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& t : forest.trees) {
    const double r = TreeRatio(t);
    if (!std::isnan(r)) best = std::max(best, r);
  }
  return best >= ratio - RelTol(ratio);
}

}  // namespace mechlab
