// SPDX-License-Identifier: Apache-2.0

#include "mechlab/covering.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "mechlab/error.h"

namespace mechlab {
namespace {

using boost::multiprecision::cpp_int;

// Dense indexing of the canonical path list: paths of leaf number li occupy
// [offset[li], offset[li + 1]) by increasing length; walk[k] is the end edge
// of path k.
struct Layout {
  std::vector<std::int64_t> leaf_pos;
  std::vector<std::size_t> offset;
  std::vector<std::size_t> walk;

  explicit Layout(const DirectedGTree& t) : leaf_pos(t.num_edges(), -1) {
    offset.push_back(0);
    for (const std::size_t leaf : t.leaf_edges()) {
      leaf_pos[leaf] = static_cast<std::int64_t>(offset.size() - 1);
      for (std::int64_t e = static_cast<std::int64_t>(leaf); e >= 0; e = t.parent(e)) {
        walk.push_back(static_cast<std::size_t>(e));
      }
      offset.push_back(walk.size());
    }
  }

  std::size_t num_paths() const { return walk.size(); }

  std::size_t Index(const TreePath& p) const {
    if (p.leaf_edge >= leaf_pos.size() || leaf_pos[p.leaf_edge] < 0) {
      throw Error(ErrorCode::kInvalidCovering,
                  "edge " + std::to_string(p.leaf_edge) + " is not a leaf edge");
    }
    const auto li = static_cast<std::size_t>(leaf_pos[p.leaf_edge]);
    const std::size_t depth = offset[li + 1] - offset[li];
    if (p.length < 1 || p.length > depth ||
        walk[offset[li] + p.length - 1] != p.end_edge) {
      throw Error(ErrorCode::kInvalidCovering,
                  "no path of length " + std::to_string(p.length) + " from leaf edge " +
                      std::to_string(p.leaf_edge) + " to edge " +
                      std::to_string(p.end_edge));
    }
    return offset[li] + p.length - 1;
  }
};

template <typename T>
std::vector<T> Densify(const Layout& layout, const BasicPathCovering<T>& x) {
  if (x.paths.size() != x.weights.size()) {
    throw Error(ErrorCode::kInvalidCovering, "one weight per path required");
  }
  std::vector<T> w(layout.num_paths(), T(0));
  std::vector<bool> seen(layout.num_paths(), false);
  for (std::size_t i = 0; i < x.paths.size(); ++i) {
    const std::size_t k = layout.Index(x.paths[i]);
    if (seen[k]) throw Error(ErrorCode::kInvalidCovering, "path listed twice");
    seen[k] = true;
    w[k] = x.weights[i];
  }
  return w;
}

template <typename T>
std::vector<T> Crossing(const DirectedGTree& t, const Layout& layout,
                        const std::vector<T>& w) {
  std::vector<T> cross(t.num_edges(), T(0));
  for (std::size_t li = 0; li + 1 < layout.offset.size(); ++li) {
    T suffix(0);
    for (std::size_t k = layout.offset[li + 1]; k-- > layout.offset[li];) {
      suffix += w[k];
      cross[layout.walk[k]] += suffix;
    }
  }
  return cross;
}

template <typename T>
std::vector<T> Terminating(const DirectedGTree& t, const Layout& layout,
                           const std::vector<T>& w) {
  std::vector<T> term(t.num_edges(), T(0));
  for (std::size_t k = 0; k < w.size(); ++k) term[layout.walk[k]] += w[k];
  return term;
}

double AsDouble(const Rational& r) { return ToDouble(r); }
double AsDouble(double d) { return d; }

template <typename T>
std::optional<CoveringViolation> ValidateImpl(const DirectedGTree& t,
                                              const BasicPathCovering<T>& x,
                                              const T& tol) {
  const Layout layout(t);
  const std::vector<T> w = Densify(layout, x);
  for (std::size_t li = 0; li + 1 < layout.offset.size(); ++li) {
    for (std::size_t k = layout.offset[li]; k < layout.offset[li + 1]; ++k) {
      if (w[k] < T(0) - tol) {
        return CoveringViolation{CoveringViolation::Kind::kNegativeWeight,
                                 t.leaf_edges()[li], AsDouble(w[k])};
      }
    }
  }
  const std::vector<T> cross = Crossing(t, layout, w);
  const std::vector<T> term = Terminating(t, layout, w);
  for (std::size_t e = 0; e < t.num_edges(); ++e) {
    if (e == t.root_edge()) {
      if (cross[e] < T(1) - tol) {
        return CoveringViolation{CoveringViolation::Kind::kRootConstraint, e,
                                 AsDouble(cross[e])};
      }
      continue;
    }
    // Paths through e and its parent are the ones crossing e without ending
    // there.
    const T lhs = term[e] - (cross[e] - term[e]);
    if (lhs < T(1) - tol) {
      return CoveringViolation{CoveringViolation::Kind::kEdgeConstraint, e,
                               AsDouble(lhs)};
    }
  }
  return std::nullopt;
}

template <typename T>
T CostImpl(const DirectedGTree& t, const BasicPathCovering<T>& x) {
  const Layout layout(t);
  const std::vector<T> cross = Crossing(t, layout, Densify(layout, x));
  return *std::max_element(cross.begin(), cross.end());
}

template <typename T>
DualityReport DualityImpl(const DirectedGTree& t, const BasicPathCovering<T>& x,
                          const T& tol) {
  if (const auto v = ValidateImpl(t, x, tol)) {
    throw Error(ErrorCode::kInvalidCovering,
                "not a path covering: " + v->Describe());
  }
  DualityReport r;
  r.sd_cost = t.sd_cost();
  r.opt_cost = t.opt_cost();
  r.covering_cost = AsDouble(CostImpl(t, x));
  r.holds = r.sd_cost <= r.covering_cost * r.opt_cost + 1e-9;
  return r;
}

// g^e for any integer e.
Rational Power(std::int64_t g, std::int64_t e) {
  const cpp_int p = boost::multiprecision::pow(cpp_int(g), static_cast<unsigned>(std::abs(e)));
  return e >= 0 ? Rational(p) : Rational(cpp_int(1), p);
}

}  // namespace

std::string CoveringViolation::Describe() const {
  switch (kind) {
    case Kind::kNegativeWeight:
      return "negative weight " + std::to_string(value) + " on a path from leaf edge " +
             std::to_string(edge);
    case Kind::kRootConstraint:
      return "root edge " + std::to_string(edge) + " is covered " +
             std::to_string(value) + " < 1";
    case Kind::kEdgeConstraint:
      return "edge " + std::to_string(edge) + " has terminating minus shared weight " +
             std::to_string(value) + " < 1";
  }
  return "unknown violation";
}

std::vector<Rational> CrossingSums(const DirectedGTree& t, const ExactCovering& x) {
  const Layout layout(t);
  return Crossing(t, layout, Densify(layout, x));
}

std::vector<double> CrossingSums(const DirectedGTree& t, const RealCovering& x) {
  const Layout layout(t);
  return Crossing(t, layout, Densify(layout, x));
}

std::vector<Rational> TerminatingSums(const DirectedGTree& t, const ExactCovering& x) {
  const Layout layout(t);
  return Terminating(t, layout, Densify(layout, x));
}

std::vector<double> TerminatingSums(const DirectedGTree& t, const RealCovering& x) {
  const Layout layout(t);
  return Terminating(t, layout, Densify(layout, x));
}

Rational Cost(const DirectedGTree& t, const ExactCovering& x) { return CostImpl(t, x); }
double Cost(const DirectedGTree& t, const RealCovering& x) { return CostImpl(t, x); }

std::optional<CoveringViolation> Validate(const DirectedGTree& t,
                                          const ExactCovering& x) {
  return ValidateImpl(t, x, Rational(0));
}

std::optional<CoveringViolation> Validate(const DirectedGTree& t,
                                          const RealCovering& x) {
  return ValidateImpl(t, x, kRealCoveringTolerance);
}

ExactCovering ConstructG1(const DirectedGTree& t) {
  if (t.leaf_edges().size() != 1) {
    throw Error(ErrorCode::kNonChain,
                "tree has " + std::to_string(t.leaf_edges().size()) +
                    " leaves; a 1-tree is a single chain");
  }
  ExactCovering x;
  x.paths = EnumeratePaths(t);
  for (const TreePath& p : x.paths) {
    x.weights.push_back(Rational(cpp_int(1) << (t.depth(p.end_edge) - 1)));
  }
  return x;
}

ExactCovering ConstructG3Plus(const DirectedGTree& t) {
  const std::int64_t g = t.g();
  if (g < 3) {
    throw Error(ErrorCode::kMalformedTree,
                "construction needs g >= 3, tree has g = " + std::to_string(g));
  }
  ExactCovering x;
  x.paths = EnumeratePaths(t);
  const Rational inv = Rational(cpp_int(1), cpp_int(g - 2));
  for (const TreePath& p : x.paths) {
    const auto len = static_cast<std::int64_t>(p.length);
    if (p.end_edge == t.root_edge()) {
      x.weights.push_back(Power(g, 2 - len) * inv);
    } else {
      x.weights.push_back(Rational(g - 1) * Power(g, 1 - len) * inv);
    }
  }
  return x;
}

RealCovering ConstructG2(const DirectedGTree& t) {
  if (t.g() != 2) {
    throw Error(ErrorCode::kMalformedTree,
                "construction needs g = 2, tree has g = " + std::to_string(t.g()));
  }
  const Layout layout(t);
  const double log_n = std::log2(static_cast<double>(t.num_nodes()));
  std::vector<double> y(layout.num_paths(), 0.0);
  std::vector<double> x(layout.num_paths(), 0.0);
  // Paths ending at each edge; a path's extension is the next index.
  std::vector<std::vector<std::size_t>> ending(t.num_edges());
  for (std::size_t k = 0; k < layout.num_paths(); ++k) ending[layout.walk[k]].push_back(k);

  for (const std::size_t e : t.post_order()) {
    if (t.is_leaf_edge(e)) {
      y[ending[e].front()] = log_n;
      continue;
    }
    for (const std::size_t c : t.children(e)) {
      double mass = 0.0;
      for (const std::size_t k : ending[c]) mass += y[k];
      if (mass <= 1.0) {
        throw Error(ErrorCode::kConstructionDegenerate,
                    "temporary mass " + std::to_string(mass) + " <= 1 at edge " +
                        std::to_string(c));
      }
      for (const std::size_t k : ending[c]) {
        x[k] = (mass + 1.0) / (2.0 * mass) * y[k];
        y[k + 1] = (mass - 1.0) / (2.0 * mass) * y[k];
      }
    }
  }
  for (const std::size_t k : ending[t.root_edge()]) x[k] = y[k];

  RealCovering out;
  out.paths = EnumeratePaths(t);
  out.weights = std::move(x);
  return out;
}

std::vector<std::size_t> SubtreeNodeCounts(const DirectedGTree& t) {
  std::vector<std::size_t> edges_below(t.num_edges(), 1);
  for (const std::size_t e : t.post_order()) {
    for (const std::size_t c : t.children(e)) edges_below[e] += edges_below[c];
  }
  for (auto& n : edges_below) n += 1;
  return edges_below;
}

DualityReport DualityBoundCheck(const DirectedGTree& t, const ExactCovering& x) {
  return DualityImpl(t, x, Rational(0));
}

DualityReport DualityBoundCheck(const DirectedGTree& t, const RealCovering& x) {
  return DualityImpl(t, x, kRealCoveringTolerance);
}

}  // namespace mechlab
