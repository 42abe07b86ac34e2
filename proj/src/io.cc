// SPDX-License-Identifier: Apache-2.0

#include "mechlab/io.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mechlab/error.h"

namespace mechlab {
namespace {

[[noreturn]] void SchemaError(const std::string& what) {
  throw Error(ErrorCode::kSchema, what);
}

const Json& Field(const Json& j, const char* key) {
  if (!j.is_object()) SchemaError("expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) SchemaError(std::string("missing field '") + key + "'");
  return *it;
}

double Real(const Json& j, const char* what) {
  if (!j.is_number()) SchemaError(std::string(what) + " must be a number");
  return j.get<double>();
}

std::int64_t Integer(const Json& j, const char* what) {
  if (!j.is_number_integer()) SchemaError(std::string(what) + " must be an integer");
  return j.get<std::int64_t>();
}

std::size_t Index(const Json& j, const char* what) {
  const std::int64_t v = Integer(j, what);
  if (v < 0) SchemaError(std::string(what) + " must be nonnegative");
  return static_cast<std::size_t>(v);
}

const Json& Array(const Json& j, const char* what) {
  if (!j.is_array()) SchemaError(std::string(what) + " must be an array");
  return j;
}

std::vector<PointId> Points(const Json& j, const char* what) {
  std::vector<PointId> out;
  for (const Json& v : Array(j, what)) out.push_back(PointId{Index(v, what)});
  return out;
}

Json Real12(double v) {
  if (std::isnan(v)) return nullptr;
  return Round12(v);
}

}  // namespace

double Round12(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(Format12(v).c_str(), nullptr);
}

std::string Format12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Json MetricToJson(const Metric& m) {
  if (m.is_line()) {
    Json coords = Json::array();
    for (const double c : m.line().coords) coords.push_back(Round12(c));
    return Json{{"type", "line"}, {"coords", coords}};
  }
  Json rows = Json::array();
  for (const auto& row : m.matrix().d) {
    Json r = Json::array();
    for (const double v : row) r.push_back(Round12(v));
    rows.push_back(r);
  }
  return Json{{"type", "matrix"}, {"d", rows}};
}

Metric MetricFromJson(const Json& j) {
  const Json& type = Field(j, "type");
  if (!type.is_string()) SchemaError("metric type must be a string");
  if (type == "line") {
    std::vector<double> coords;
    for (const Json& c : Array(Field(j, "coords"), "coords")) {
      coords.push_back(Real(c, "coordinate"));
    }
    return Metric::FromLine(std::move(coords));
  }
  if (type == "matrix") {
    std::vector<std::vector<double>> d;
    for (const Json& row : Array(Field(j, "d"), "d")) {
      std::vector<double> r;
      for (const Json& v : Array(row, "matrix row")) r.push_back(Real(v, "distance"));
      d.push_back(std::move(r));
    }
    return Metric::FromMatrix(std::move(d));
  }
  SchemaError("unknown metric type '" + type.get<std::string>() + "'");
}

Json InstanceToJson(const Instance& inst) {
  Json agents = Json::array();
  for (const PointId p : inst.agents()) agents.push_back(p.index);
  Json facilities = Json::array();
  for (const PointId p : inst.facilities()) facilities.push_back(p.index);
  return Json{{"metric", MetricToJson(inst.metric())},
              {"agents", agents},
              {"facilities", facilities},
              {"capacities", inst.capacities()}};
}

Instance InstanceFromJson(const Json& j) {
  Metric metric = MetricFromJson(Field(j, "metric"));
  std::vector<PointId> agents = Points(Field(j, "agents"), "agent point");
  std::vector<PointId> facilities = Points(Field(j, "facilities"), "facility point");
  std::vector<std::int64_t> caps;
  for (const Json& c : Array(Field(j, "capacities"), "capacities")) {
    caps.push_back(Integer(c, "capacity"));
  }
  return Instance(std::move(metric), std::move(agents), std::move(facilities),
                  std::move(caps));
}

Json AssignmentToJson(const Assignment& a) {
  return Json{{"assigned", a.assigned}, {"cost", Round12(a.cost)}};
}

Json RatioReportToJson(const RatioReport& r) {
  return Json{{"instance", r.instance_id}, {"mech", r.mechanism},
              {"g", r.g},                  {"sc_mech", Real12(r.sc_mech)},
              {"sc_opt", Real12(r.sc_opt)}, {"ratio", Real12(r.ratio)},
              {"degenerate", r.degenerate}};
}

Json TreeToJson(const DirectedGTree& t) {
  Json nodes = Json::array();
  for (std::size_t v = 0; v < t.num_nodes(); ++v) {
    nodes.push_back(Json{{"id", v},
                         {"facility", t.nodes()[v].facility},
                         {"point", t.nodes()[v].point.index}});
  }
  Json edges = Json::array();
  for (std::size_t e = 0; e < t.num_edges(); ++e) {
    const TreeEdge& ed = t.edges()[e];
    edges.push_back(Json{{"id", e},
                         {"agent", ed.agent},
                         {"agent_point", ed.agent_point.index},
                         {"from", ed.from},
                         {"to", ed.to},
                         {"opt_dist", Round12(ed.opt_dist)},
                         {"sd_dist", Round12(ed.sd_dist)}});
  }
  return Json{{"g", t.g()}, {"root", t.root_node()}, {"nodes", nodes}, {"edges", edges}};
}

DirectedGTree TreeFromJson(const Json& j) {
  const std::int64_t g = Integer(Field(j, "g"), "g");
  if (j.contains("parents")) {
    std::vector<std::int64_t> parents;
    for (const Json& p : Array(j["parents"], "parents")) parents.push_back(Integer(p, "parent"));
    return DirectedGTree::FromParents(g, parents);
  }
  const Json& edges_json = Array(Field(j, "edges"), "edges");
  std::vector<TreeEdge> edges(edges_json.size());
  std::vector<bool> seen(edges.size(), false);
  std::size_t max_node = 0;
  for (std::size_t i = 0; i < edges_json.size(); ++i) {
    const Json& e = edges_json[i];
    const std::size_t id = e.contains("id") ? Index(e["id"], "edge id") : i;
    if (id >= edges.size() || seen[id]) SchemaError("edge ids must be 0..E-1");
    seen[id] = true;
    TreeEdge ed;
    ed.agent = e.contains("agent") ? Index(e["agent"], "agent") : id;
    ed.agent_point = PointId{e.contains("agent_point") ? Index(e["agent_point"], "agent_point") : 0};
    ed.from = Index(Field(e, "from"), "from");
    ed.to = Index(Field(e, "to"), "to");
    ed.opt_dist = e.contains("opt_dist") ? Real(e["opt_dist"], "opt_dist") : 0.0;
    ed.sd_dist = e.contains("sd_dist") ? Real(e["sd_dist"], "sd_dist") : 0.0;
    max_node = std::max({max_node, ed.from, ed.to});
    edges[id] = ed;
  }
  std::vector<TreeNode> nodes;
  if (j.contains("nodes")) {
    const Json& nodes_json = Array(j["nodes"], "nodes");
    nodes.resize(nodes_json.size());
    std::vector<bool> node_seen(nodes.size(), false);
    for (std::size_t i = 0; i < nodes_json.size(); ++i) {
      const Json& v = nodes_json[i];
      const std::size_t id = v.contains("id") ? Index(v["id"], "node id") : i;
      if (id >= nodes.size() || node_seen[id]) SchemaError("node ids must be 0..N-1");
      node_seen[id] = true;
      nodes[id] = TreeNode{PointId{v.contains("point") ? Index(v["point"], "point") : 0},
                           v.contains("facility") ? Index(v["facility"], "facility") : id};
    }
  } else {
    nodes.resize(edges.empty() ? 0 : max_node + 1);
    for (std::size_t v = 0; v < nodes.size(); ++v) nodes[v] = TreeNode{PointId{0}, v};
  }
  return DirectedGTree::FromEdges(g, std::move(nodes), std::move(edges));
}

Json ForestToJson(const Forest& f) {
  Json components = Json::array();
  for (const auto& t : f.trees) components.push_back(TreeToJson(t));
  return Json{{"g", f.g},
              {"passes", f.passes},
              {"metric", MetricToJson(f.metric)},
              {"components", components}};
}

std::string PathKey(const DirectedGTree& t, const TreePath& p) {
  std::string key;
  for (const std::size_t e : PathEdges(t, p)) {
    if (!key.empty()) key += '>';
    key += std::to_string(e);
  }
  return key;
}

TreePath ParsePathKey(const DirectedGTree& t, const std::string& key) {
  std::vector<std::size_t> seq;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, '>')) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(part.c_str(), &end, 10);
    if (part.empty() || *end != '\0') {
      throw Error(ErrorCode::kInvalidCovering, "malformed path key '" + key + "'");
    }
    seq.push_back(static_cast<std::size_t>(v));
  }
  if (seq.empty() || seq.front() >= t.num_edges() || !t.is_leaf_edge(seq.front())) {
    throw Error(ErrorCode::kInvalidCovering, "path '" + key + "' does not start at a leaf edge");
  }
  std::int64_t e = static_cast<std::int64_t>(seq.front());
  for (std::size_t i = 1; i < seq.size(); ++i) {
    e = t.parent(static_cast<std::size_t>(e));
    if (e < 0 || static_cast<std::size_t>(e) != seq[i]) {
      throw Error(ErrorCode::kInvalidCovering, "'" + key + "' is not a path of the tree");
    }
  }
  return TreePath{seq.front(), seq.back(), seq.size()};
}

Json CoveringToJson(const DirectedGTree& t, const ExactCovering& x) {
  Json weights = Json::object();
  for (std::size_t i = 0; i < x.paths.size(); ++i) {
    if (x.weights[i] != 0) weights[PathKey(t, x.paths[i])] = ToString(x.weights[i]);
  }
  return Json{{"g", t.g()}, {"cost", ToString(Cost(t, x))}, {"weights", weights}};
}

Json CoveringToJson(const DirectedGTree& t, const RealCovering& x) {
  Json weights = Json::object();
  for (std::size_t i = 0; i < x.paths.size(); ++i) {
    if (x.weights[i] != 0) weights[PathKey(t, x.paths[i])] = Round12(x.weights[i]);
  }
  return Json{{"g", t.g()}, {"cost", Round12(Cost(t, x))}, {"weights", weights}};
}

LoadedCovering CoveringFromJson(const DirectedGTree& t, const Json& j) {
  const Json& weights = Field(j, "weights");
  if (!weights.is_object()) SchemaError("weights must be an object");
  LoadedCovering out;
  for (const auto& [key, w] : weights.items()) {
    if (!w.is_string() && !w.is_number()) SchemaError("weights must be numbers or \"p/q\"");
    if (!w.is_string() && !w.is_number_integer()) out.exact = false;
  }
  for (const auto& [key, w] : weights.items()) {
    const TreePath p = ParsePathKey(t, key);
    if (out.exact) {
      out.exact_covering.paths.push_back(p);
      out.exact_covering.weights.push_back(
          w.is_string() ? ParseRational(w.get<std::string>()) : Rational(w.get<std::int64_t>()));
    } else {
      out.real_covering.paths.push_back(p);
      out.real_covering.weights.push_back(
          w.is_string() ? ToDouble(ParseRational(w.get<std::string>())) : w.get<double>());
    }
  }
  return out;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kSchema, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInvalidParameter, "cannot write '" + path + "'");
  out << text;
}

Json LoadJsonFile(const std::string& path) {
  try {
    return Json::parse(ReadFile(path));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kSchema, "'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace mechlab
