// SPDX-License-Identifier: Apache-2.0

// Helpers shared by the unit tests and the acceptance binary: random line
// instances and oracles that are written independently of the library code
// they check.

#ifndef MECHLAB_TESTS_TEST_UTIL_H_
#define MECHLAB_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "mechlab/instance.h"
#include "mechlab/mechanisms.h"

namespace mechlab::testing {

struct RandomCase {
  Instance instance;
  Ordering order;
};

// Uniform points on [0, 10] rounded to quarters, so ties and coinciding
// points show up. Agents come first, then facilities; capacities in 1..3
// with the first one topped up to cover every agent.
inline RandomCase RandomLineCase(std::mt19937_64& rng, std::size_t max_agents = 7,
                                 std::size_t max_facilities = 4) {
  std::uniform_int_distribution<std::size_t> n_dist(1, max_agents);
  std::uniform_int_distribution<std::size_t> m_dist(1, max_facilities);
  std::uniform_int_distribution<int> quarter(0, 40);
  std::uniform_int_distribution<std::int64_t> cap(1, 3);
  const std::size_t n = n_dist(rng);
  const std::size_t m = m_dist(rng);
  std::vector<double> coords;
  for (std::size_t i = 0; i < n + m; ++i) coords.push_back(quarter(rng) / 4.0);
  std::vector<PointId> agents, facilities;
  std::vector<std::int64_t> caps;
  for (std::size_t i = 0; i < n; ++i) agents.push_back(PointId{i});
  for (std::size_t j = 0; j < m; ++j) {
    facilities.push_back(PointId{n + j});
    caps.push_back(cap(rng));
  }
  const std::int64_t total = std::accumulate(caps.begin(), caps.end(), std::int64_t{0});
  if (total < static_cast<std::int64_t>(n)) caps[0] += static_cast<std::int64_t>(n) - total;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  return {Instance(Metric::FromLine(coords), agents, facilities, caps), Ordering(perm)};
}

// Minimum cost by trying every facility for every agent.
inline double OracleOptimalCost(const Instance& inst) {
  const std::size_t n = inst.num_agents();
  std::vector<std::int64_t> left = inst.capacities();
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, double)> go = [&](std::size_t i, double acc) {
    if (acc >= best) return;
    if (i == n) {
      best = acc;
      return;
    }
    for (std::size_t j = 0; j < inst.num_facilities(); ++j) {
      if (left[j] == 0) continue;
      --left[j];
      go(i + 1, acc + inst.metric().distance(inst.agents()[i], inst.facilities()[j]));
      ++left[j];
    }
  };
  go(0, 0.0);
  return best;
}

// Textbook serial dictatorship with capacities scaled by g.
inline std::vector<std::size_t> OracleSd(const Instance& inst, const std::vector<std::size_t>& order,
                                         std::int64_t g) {
  std::vector<std::int64_t> left = inst.capacities();
  for (auto& c : left) c *= g;
  std::vector<std::size_t> out(inst.num_agents());
  for (std::size_t i : order) {
    std::size_t pick = inst.num_facilities();
    double d_best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < inst.num_facilities(); ++j) {
      const double d = inst.metric().distance(inst.agents()[i], inst.facilities()[j]);
      if (left[j] > 0 && d < d_best) {
        d_best = d;
        pick = j;
      }
    }
    --left[pick];
    out[i] = pick;
  }
  return out;
}

inline double OracleCost(const Instance& inst, const std::vector<std::size_t>& assigned) {
  double c = 0.0;
  for (std::size_t i = 0; i < assigned.size(); ++i) {
    c += inst.metric().distance(inst.agents()[i], inst.facilities()[assigned[i]]);
  }
  return c;
}

// Mean SD cost over all orderings, via std::next_permutation.
inline double OracleRsd(const Instance& inst, std::int64_t g) {
  std::vector<std::size_t> perm(inst.num_agents());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double sum = 0.0;
  std::uint64_t count = 0;
  do {
    sum += OracleCost(inst, OracleSd(inst, perm, g));
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum / static_cast<double>(count);
}

// Every directed g-tree shape with at most `max_edges` edges, as parent
// arrays (parent[e] = -1 for the root edge). A subtree below an edge is
// either nothing (leaf edge) or exactly g child subtrees; g = 1 gives chains.
inline std::vector<std::vector<std::int64_t>> EnumerateTreeShapes(std::int64_t g,
                                                                  std::size_t max_edges) {
  // shapes[s] = all child-structures of an edge's subtree with s edges,
  // stored as parent arrays relative to the subtree's top edge (index 0).
  std::vector<std::vector<std::vector<std::int64_t>>> shapes(max_edges + 1);
  shapes[1].push_back({-1});
  for (std::size_t s = 2; s <= max_edges; ++s) {
    // s - 1 edges split among g ordered children, each nonempty.
    std::function<void(std::int64_t, std::size_t, std::vector<std::int64_t>&)> place =
        [&](std::int64_t child, std::size_t remaining, std::vector<std::int64_t>& acc) {
          if (child == g) {
            if (remaining == 0) shapes[s].push_back(acc);
            return;
          }
          for (std::size_t size = 1; size <= remaining; ++size) {
            if (shapes[size].empty()) continue;
            for (const auto& sub : shapes[size]) {
              const std::int64_t base = static_cast<std::int64_t>(acc.size());
              for (std::size_t e = 0; e < sub.size(); ++e) {
                acc.push_back(sub[e] < 0 ? 0 : sub[e] + base);
              }
              place(child + 1, remaining - size, acc);
              acc.resize(static_cast<std::size_t>(base));
            }
          }
        };
    std::vector<std::int64_t> acc = {-1};
    place(0, s - 1, acc);
  }
  std::vector<std::vector<std::int64_t>> out;
  for (std::size_t s = 1; s <= max_edges; ++s) {
    out.insert(out.end(), shapes[s].begin(), shapes[s].end());
  }
  return out;
}

// Number of g-tree shapes with exactly s edges, by the same recursion on
// counts only: T(1) = 1, T(s) = sum over compositions of s - 1 into g parts.
inline std::uint64_t CountTreeShapes(std::int64_t g, std::size_t s) {
  std::vector<std::uint64_t> t(s + 1, 0);
  t[1] = 1;
  for (std::size_t k = 2; k <= s; ++k) {
    // ways[c][r]: c children using r edges
    std::vector<std::uint64_t> ways(k, 0);
    ways[0] = 1;
    for (std::int64_t c = 0; c < g; ++c) {
      std::vector<std::uint64_t> next(k, 0);
      for (std::size_t r = 0; r < k; ++r) {
        if (ways[r] == 0) continue;
        for (std::size_t a = 1; r + a < k; ++a) next[r + a] += ways[r] * t[a];
      }
      ways = next;
    }
    t[k] = ways[k - 1];
  }
  return t[s];
}

}  // namespace mechlab::testing

#endif  // MECHLAB_TESTS_TEST_UTIL_H_
