// SPDX-License-Identifier: Apache-2.0

#include "mechlab/matching.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <string>
#include <utility>

#include "mechlab/error.h"

namespace mechlab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Source -> supply groups -> facility nodes -> sink. Arc e and e ^ 1 are a
// forward/backward pair; `cap` holds residual capacity.
class TransportNetwork {
 public:
  struct Arc {
    int to;
    std::int64_t cap;
    double cost;
  };

  TransportNetwork(std::vector<std::int64_t> supply,
                   std::vector<std::int64_t> capacity,
                   const std::function<double(int, int)>& cost)
      : groups_(static_cast<int>(supply.size())),
        facilities_(static_cast<int>(capacity.size())),
        adj_(static_cast<std::size_t>(groups_ + facilities_ + 2)) {
    std::int64_t total = 0;
    for (const auto s : supply) total += s;
    demand_ = total;
    for (int a = 0; a < groups_; ++a) AddArc(source(), group(a), supply[a], 0.0);
    group_fac_.resize(static_cast<std::size_t>(groups_) * facilities_);
    for (int a = 0; a < groups_; ++a) {
      for (int j = 0; j < facilities_; ++j) {
        group_fac_[a * facilities_ + j] =
            AddArc(group(a), facility(j), total, cost(a, j));
      }
    }
    fac_sink_.resize(facilities_);
    for (int j = 0; j < facilities_; ++j) {
      fac_sink_[j] = AddArc(facility(j), sink(), capacity[j], 0.0);
    }
  }

  int source() const { return 0; }
  int group(int a) const { return 1 + a; }
  int facility(int j) const { return 1 + groups_ + j; }
  int sink() const { return 1 + groups_ + facilities_; }
  int num_nodes() const { return groups_ + facilities_ + 2; }
  int num_groups() const { return groups_; }
  int num_facilities() const { return facilities_; }

  int group_fac_arc(int a, int j) const { return group_fac_[a * facilities_ + j]; }
  int fac_sink_arc(int j) const { return fac_sink_[j]; }
  std::int64_t flow(int arc) const { return arcs_[arc ^ 1].cap; }

  // Successive shortest paths with Dijkstra on reduced costs.
  void Solve() {
    std::vector<double> potential(num_nodes(), 0.0);
    std::vector<double> dist(num_nodes());
    std::vector<int> parent_arc(num_nodes());
    std::int64_t pushed = 0;
    while (pushed < demand_) {
      std::fill(dist.begin(), dist.end(), kInf);
      std::fill(parent_arc.begin(), parent_arc.end(), -1);
      using Entry = std::pair<double, int>;
      std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
      dist[source()] = 0.0;
      heap.emplace(0.0, source());
      while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        for (const int e : adj_[u]) {
          const Arc& arc = arcs_[e];
          if (arc.cap <= 0) continue;
          // Potentials keep reduced costs nonnegative up to rounding.
          const double rc =
              std::max(0.0, arc.cost + potential[u] - potential[arc.to]);
          if (d + rc < dist[arc.to]) {
            dist[arc.to] = d + rc;
            parent_arc[arc.to] = e;
            heap.emplace(dist[arc.to], arc.to);
          }
        }
      }
      if (dist[sink()] == kInf) {
        throw Error(ErrorCode::kInfeasible, "capacities cannot host all agents");
      }
      for (int v = 0; v < num_nodes(); ++v) {
        if (dist[v] < kInf) potential[v] += dist[v];
      }
      std::int64_t bottleneck = std::numeric_limits<std::int64_t>::max();
      for (int v = sink(); v != source(); v = arcs_[parent_arc[v] ^ 1].to) {
        bottleneck = std::min(bottleneck, arcs_[parent_arc[v]].cap);
      }
      for (int v = sink(); v != source(); v = arcs_[parent_arc[v] ^ 1].to) {
        Push(parent_arc[v], bottleneck);
      }
      pushed += bottleneck;
    }
  }

  void Push(int arc, std::int64_t amount) {
    arcs_[arc].cap -= amount;
    arcs_[arc ^ 1].cap += amount;
  }

  const Arc& arc(int e) const { return arcs_[e]; }
  Arc& mutable_arc(int e) { return arcs_[e]; }
  int tail(int e) const { return arcs_[e ^ 1].to; }
  const std::vector<int>& out_arcs(int v) const { return adj_[v]; }
  std::size_t num_arcs() const { return arcs_.size(); }

 private:
  int AddArc(int from, int to, std::int64_t cap, double cost) {
    const int id = static_cast<int>(arcs_.size());
    arcs_.push_back({to, cap, cost});
    arcs_.push_back({from, 0, -cost});
    adj_[from].push_back(id);
    adj_[to].push_back(id + 1);
    return id;
  }

  int groups_;
  int facilities_;
  std::int64_t demand_ = 0;
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> group_fac_;
  std::vector<int> fac_sink_;
};

// Groups of points that are indistinguishable for the matcher: equal
// coordinates on a line, equal ids otherwise.
struct PointGroups {
  std::vector<std::size_t> group_of;       // per item
  std::vector<std::size_t> representative; // per group, item index
  std::vector<std::int64_t> weight;        // per group
};

PointGroups GroupPoints(const Metric& metric, const std::vector<PointId>& points,
                        const std::vector<std::int64_t>* weights) {
  PointGroups out;
  out.group_of.resize(points.size());
  std::map<double, std::size_t> by_coord;
  std::map<std::size_t, std::size_t> by_id;
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::size_t next = out.representative.size();
    std::size_t g = 0;
    if (metric.is_line()) {
      g = by_coord.try_emplace(metric.line().coords[points[i].index], next)
              .first->second;
    } else {
      g = by_id.try_emplace(points[i].index, next).first->second;
    }
    if (g == next) {
      out.representative.push_back(i);
      out.weight.push_back(0);
    }
    out.group_of[i] = g;
    out.weight[g] += weights ? (*weights)[i] : 1;
  }
  return out;
}

void CheckAssignment(const Instance& inst, const std::vector<std::size_t>& assigned) {
  if (assigned.size() != inst.num_agents()) {
    throw Error(ErrorCode::kInvalidAssignment,
                "assignment has " + std::to_string(assigned.size()) +
                    " entries for " + std::to_string(inst.num_agents()) +
                    " agents");
  }
  std::vector<std::int64_t> load(inst.num_facilities(), 0);
  for (std::size_t i = 0; i < assigned.size(); ++i) {
    if (assigned[i] >= inst.num_facilities()) {
      throw Error(ErrorCode::kInvalidAssignment,
                  "agent " + std::to_string(i) + " assigned to unknown facility");
    }
    if (++load[assigned[i]] > inst.capacities()[assigned[i]]) {
      throw Error(ErrorCode::kInvalidAssignment,
                  "facility " + std::to_string(assigned[i]) +
                      " exceeds its capacity");
    }
  }
}

double SumCost(const Instance& inst, const std::vector<std::size_t>& assigned) {
  double total = 0.0;
  for (std::size_t i = 0; i < assigned.size(); ++i) total += inst.cost(i, assigned[i]);
  return total;
}

// Walks agents in index order and moves each to the smallest facility index
// it can take in some optimal solution, reshaping the remaining optimal flow
// along zero reduced-cost cycles.
std::vector<std::size_t> LexicographicExtraction(TransportNetwork& net,
                                                 const PointGroups& agent_groups,
                                                 double max_cost) {
  const int nodes = net.num_nodes();
  const int src = net.source();
  const double tol = 1e-9 * (1.0 + max_cost);

  // Potentials for the residual graph via Bellman-Ford from a virtual root;
  // the source is excluded since supplies stay saturated.
  std::vector<double> pi(nodes, 0.0);
  for (int iter = 0; iter < nodes; ++iter) {
    bool changed = false;
    for (std::size_t e = 0; e < net.num_arcs(); ++e) {
      const auto& arc = net.arc(static_cast<int>(e));
      const int u = net.tail(static_cast<int>(e));
      if (arc.cap <= 0 || u == src || arc.to == src) continue;
      if (pi[u] + arc.cost < pi[arc.to]) {
        pi[arc.to] = pi[u] + arc.cost;
        changed = true;
      }
    }
    if (!changed) break;
  }
  const auto tight = [&](int e) {
    const auto& arc = net.arc(e);
    return arc.cost + pi[net.tail(e)] - pi[arc.to] <= tol;
  };

  const std::size_t n = agent_groups.group_of.size();
  const int m = net.num_facilities();
  std::vector<std::size_t> assigned(n);
  std::vector<int> parent(nodes);
  for (std::size_t i = 0; i < n; ++i) {
    const int a = static_cast<int>(agent_groups.group_of[i]);
    const int ga = net.group(a);
    int chosen = -1;
    for (int j = 0; j < m && chosen < 0; ++j) {
      const int e = net.group_fac_arc(a, j);
      if (net.flow(e) >= 1) {
        chosen = j;
        break;
      }
      if (!tight(e)) continue;
      // Zero-cost residual path facility(j) -> group(a) closes a cycle
      // through arc e.
      std::fill(parent.begin(), parent.end(), -2);
      std::deque<int> queue{net.facility(j)};
      parent[net.facility(j)] = -1;
      while (!queue.empty() && parent[ga] == -2) {
        const int u = queue.front();
        queue.pop_front();
        for (const int out : net.out_arcs(u)) {
          const auto& arc = net.arc(out);
          if (arc.cap <= 0 || arc.to == src || parent[arc.to] != -2) continue;
          if (!tight(out)) continue;
          parent[arc.to] = out;
          queue.push_back(arc.to);
        }
      }
      if (parent[ga] == -2) continue;
      for (int v = ga; parent[v] != -1; v = net.tail(parent[v])) {
        net.Push(parent[v], 1);
      }
      net.Push(e, 1);
      chosen = j;
    }
    if (chosen < 0) {
      throw Error(ErrorCode::kStructural, "lexicographic extraction lost flow");
    }
    // Fix agent i: drop one unit of flow, the slot it uses, and its supply.
    const int e = net.group_fac_arc(a, chosen);
    net.mutable_arc(e ^ 1).cap -= 1;
    net.mutable_arc(net.fac_sink_arc(chosen) ^ 1).cap -= 1;
    for (const int out : net.out_arcs(src)) {
      if (net.arc(out).to == ga) net.mutable_arc(out ^ 1).cap -= 1;
    }
    assigned[i] = static_cast<std::size_t>(chosen);
  }
  return assigned;
}

}  // namespace

Assignment MakeAssignment(const Instance& inst, std::vector<std::size_t> assigned) {
  CheckAssignment(inst, assigned);
  const double cost = SumCost(inst, assigned);
  return Assignment{std::move(assigned), cost};
}

double SocialCost(const Instance& inst, const Assignment& a) {
  CheckAssignment(inst, a.assigned);
  return SumCost(inst, a.assigned);
}

Assignment Optimal(const Instance& inst) {
  const Metric& metric = inst.metric();
  const PointGroups agents = GroupPoints(metric, inst.agents(), nullptr);
  const std::size_t m = inst.num_facilities();
  std::vector<std::int64_t> capacity(m);
  const auto n = static_cast<std::int64_t>(inst.num_agents());
  for (std::size_t j = 0; j < m; ++j) {
    capacity[j] = std::min(inst.capacities()[j], n);
  }
  double max_cost = 0.0;
  const auto cost = [&](int a, int j) {
    const double d = inst.cost(agents.representative[a], static_cast<std::size_t>(j));
    max_cost = std::max(max_cost, d);
    return d;
  };
  TransportNetwork net(agents.weight, capacity, cost);
  net.Solve();
  auto assigned = LexicographicExtraction(net, agents, max_cost);
  return MakeAssignment(inst, std::move(assigned));
}

double OptimalCost(const Instance& inst) {
  const Metric& metric = inst.metric();
  const PointGroups agents = GroupPoints(metric, inst.agents(), nullptr);
  const PointGroups facilities =
      GroupPoints(metric, inst.facilities(), &inst.capacities());
  const auto n = static_cast<std::int64_t>(inst.num_agents());
  std::vector<std::int64_t> capacity = facilities.weight;
  for (auto& c : capacity) c = std::min(c, n);
  const auto cost = [&](int a, int j) {
    return inst.cost(agents.representative[a], facilities.representative[j]);
  };
  TransportNetwork net(agents.weight, capacity, cost);
  net.Solve();
  double total = 0.0;
  for (int a = 0; a < net.num_groups(); ++a) {
    for (int j = 0; j < net.num_facilities(); ++j) {
      const std::int64_t f = net.flow(net.group_fac_arc(a, j));
      if (f > 0) total += static_cast<double>(f) * cost(a, j);
    }
  }
  return total;
}

Assignment BruteForceOptimal(const Instance& inst) {
  const std::size_t n = inst.num_agents();
  const std::size_t m = inst.num_facilities();
  std::int64_t slots = 0;
  for (const auto c : inst.capacities()) {
    slots += std::min<std::int64_t>(c, static_cast<std::int64_t>(n));
  }
  if (n > kBruteForceMaxAgents || slots > kBruteForceMaxSlots) {
    throw Error(ErrorCode::kGuardExceeded,
                "brute force limited to n <= 9 and 12 slots");
  }
  if (slots < static_cast<std::int64_t>(n)) {
    throw Error(ErrorCode::kInfeasible, "capacities cannot host all agents");
  }
  std::vector<std::int64_t> residual = inst.capacities();
  std::vector<std::size_t> current(n), best;
  double best_cost = kInf;
  // Depth-first in agent order, facilities ascending: the first assignment
  // reaching the minimum is the lexicographically smallest one.
  std::function<void(std::size_t, double)> search = [&](std::size_t i, double acc) {
    if (i == n) {
      if (acc < best_cost) {
        best_cost = acc;
        best = current;
      }
      return;
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (residual[j] == 0) continue;
      --residual[j];
      current[i] = j;
      search(i + 1, acc + inst.cost(i, j));
      ++residual[j];
    }
  };
  search(0, 0.0);
  if (best.empty()) throw Error(ErrorCode::kInfeasible, "no feasible assignment");
  return MakeAssignment(inst, std::move(best));
}

}  // namespace mechlab
