// SPDX-License-Identifier: Apache-2.0

// JSON encodings of the library types. Loaders throw kSchema for malformed
// documents; instance loading additionally surfaces kCapacitySum and
// kMetricViolation from validation. Reals are rounded to 12 significant
// digits on output.

#ifndef MECHLAB_IO_H_
#define MECHLAB_IO_H_

#include <string>
#include <vector>

#include "json.hpp"

#include "mechlab/covering.h"
#include "mechlab/gtree.h"
#include "mechlab/instance.h"
#include "mechlab/matching.h"
#include "mechlab/mechanisms.h"

namespace mechlab {

using Json = nlohmann::json;

// %.12g round trip.
double Round12(double v);
// %.12g text.
std::string Format12(double v);

Json MetricToJson(const Metric& m);
Metric MetricFromJson(const Json& j);

Json InstanceToJson(const Instance& inst);
Instance InstanceFromJson(const Json& j);

Json AssignmentToJson(const Assignment& a);

// "ratio" is null for degenerate reports.
Json RatioReportToJson(const RatioReport& r);

Json TreeToJson(const DirectedGTree& t);
// Accepts the TreeToJson layout (nodes optional) or {"g": G, "parents": [...]}.
DirectedGTree TreeFromJson(const Json& j);

Json ForestToJson(const Forest& f);

// Path key "leafEdge>...>endEdge".
std::string PathKey(const DirectedGTree& t, const TreePath& p);
TreePath ParsePathKey(const DirectedGTree& t, const std::string& key);

// {"g", "cost", "weights": {key: "p/q"}}; zero weights are omitted.
Json CoveringToJson(const DirectedGTree& t, const ExactCovering& x);
// {"g", "cost", "weights": {key: number}}.
Json CoveringToJson(const DirectedGTree& t, const RealCovering& x);

// Exact when every weight is a "p/q" string or an integer, real otherwise.
// Throws kInvalidCovering for keys that are not paths of `t`.
struct LoadedCovering {
  bool exact = true;
  ExactCovering exact_covering;
  RealCovering real_covering;
};
LoadedCovering CoveringFromJson(const DirectedGTree& t, const Json& j);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, const std::string& text);
Json LoadJsonFile(const std::string& path);

}  // namespace mechlab

#endif  // MECHLAB_IO_H_
