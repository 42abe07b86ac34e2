// SPDX-License-Identifier: Apache-2.0

#ifndef MECHLAB_INSTANCE_H_
#define MECHLAB_INSTANCE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mechlab/metric.h"

namespace mechlab {

// Agents' preferred points, facility points and integer capacities on a
// shared metric. Immutable once constructed; the constructor enforces
// nonempty lists, positive capacities, sum(capacities) >= #agents, valid
// point ids and a valid metric.
class Instance {
 public:
  Instance(Metric metric, std::vector<PointId> agents,
           std::vector<PointId> facilities, std::vector<std::int64_t> capacities);

  const Metric& metric() const { return metric_; }
  const std::vector<PointId>& agents() const { return agents_; }
  const std::vector<PointId>& facilities() const { return facilities_; }
  const std::vector<std::int64_t>& capacities() const { return capacities_; }

  std::size_t num_agents() const { return agents_.size(); }
  std::size_t num_facilities() const { return facilities_.size(); }
  std::int64_t total_capacity() const;

  // d(A_agent, F_facility) without range checks.
  double cost(std::size_t agent, std::size_t facility) const {
    return metric_.distance_unchecked(agents_[agent].index,
                                      facilities_[facility].index);
  }

  friend bool operator==(const Instance&, const Instance&) = default;
  friend Instance WithAgentPoint(const Instance& inst, std::size_t agent,
                                 PointId point);

 private:
  Metric metric_;
  std::vector<PointId> agents_;
  std::vector<PointId> facilities_;
  std::vector<std::int64_t> capacities_;
};

// Same instance with every capacity multiplied by g (g >= 1).
Instance Augment(const Instance& inst, std::int64_t g);

// Same instance with one agent's preferred point replaced.
Instance WithAgentPoint(const Instance& inst, std::size_t agent, PointId point);

// Worst-case families on the line. Points of interest are -eps, 1, 2, ...,
// 2^k; level-i agents sit at 2^i and the level-i facility at 2^i (level 0 at
// -eps).
struct SdLowerBound {
  std::int64_t g = 1;
  std::int64_t k = 1;
  double eps = 1e-6;
};
struct RsdLowerBound {
  std::int64_t k = 1;
  double eps = 1e-6;
};
// F1 at 0 and F2 at 2, unit capacities, agents at 1 - delta and 0.
struct TwoFacilitySd {
  double delta = 1e-6;
};
// F1 at 0 with capacity n - 1, F2 at 2 + eps with capacity 1; n - 1 agents
// at F1 followed by one agent at 1.
struct TwoFacilityAnonymous {
  std::int64_t n = 2;
  double eps = 1e-6;
};

using Family =
    std::variant<SdLowerBound, RsdLowerBound, TwoFacilitySd, TwoFacilityAnonymous>;

// "sd-lb", "rsd-lb", "two-sd", "two-anon".
std::string FamilyName(const Family& f);

// Upper limit on generated agents; larger parameter choices are rejected
// along with those overflowing 64-bit capacities.
inline constexpr std::int64_t kMaxGeneratedAgents = 50'000'000;

Instance Generate(const Family& f);

// A leveled line instance together with the level of every agent.
// Agents are listed level by level, level 0 first.
struct LevelInstance {
  Instance instance;
  std::vector<std::int64_t> level_sizes;      // agents per level, k entries
  std::vector<std::size_t> agent_level;       // per agent
  std::vector<std::size_t> facility_level;    // per facility, k + 1 entries
};

// level_sizes has k entries, capacities has k + 1 (the last one is the
// level-k facility, which hosts no agents).
LevelInstance GenerateLevels(std::span<const std::int64_t> level_sizes,
                             std::span<const std::int64_t> capacities,
                             double eps);

// Leveled form of an SdLowerBound or RsdLowerBound family.
LevelInstance GenerateLevels(const Family& f);

}  // namespace mechlab

#endif  // MECHLAB_INSTANCE_H_
