// SPDX-License-Identifier: Apache-2.0

#include "mechlab/instance.h"

#include <cmath>
#include <numeric>
#include <string>

#include "mechlab/error.h"

namespace mechlab {
namespace {

std::int64_t CheckedMul(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw Error(ErrorCode::kInvalidParameter, "capacity overflows 64 bits");
  }
  return out;
}

std::int64_t CheckedPow(std::int64_t base, std::int64_t exp) {
  std::int64_t out = 1;
  for (std::int64_t i = 0; i < exp; ++i) out = CheckedMul(out, base);
  return out;
}

void RequirePositiveFinite(double v, const char* name) {
  if (!(v > 0) || !std::isfinite(v)) {
    throw Error(ErrorCode::kInvalidParameter,
                std::string(name) + " must be a positive real");
  }
}

}  // namespace

Instance::Instance(Metric metric, std::vector<PointId> agents,
                   std::vector<PointId> facilities,
                   std::vector<std::int64_t> capacities)
    : metric_(std::move(metric)),
      agents_(std::move(agents)),
      facilities_(std::move(facilities)),
      capacities_(std::move(capacities)) {
  if (agents_.empty()) throw Error(ErrorCode::kSchema, "instance has no agents");
  if (facilities_.empty()) {
    throw Error(ErrorCode::kSchema, "instance has no facilities");
  }
  if (capacities_.size() != facilities_.size()) {
    throw Error(ErrorCode::kSchema, "one capacity per facility required");
  }
  for (const std::int64_t c : capacities_) {
    if (c <= 0) throw Error(ErrorCode::kSchema, "capacities must be positive");
  }
  for (const PointId p : agents_) metric_.CheckPoint(p);
  for (const PointId p : facilities_) metric_.CheckPoint(p);
  if (total_capacity() < static_cast<std::int64_t>(agents_.size())) {
    throw Error(ErrorCode::kCapacitySum,
                "sum of capacities " + std::to_string(total_capacity()) +
                    " < number of agents " + std::to_string(agents_.size()));
  }
  if (const auto v = Validate(metric_)) {
    throw Error(ErrorCode::kMetricViolation, v->Describe());
  }
}

std::int64_t Instance::total_capacity() const {
  std::int64_t total = 0;
  for (const std::int64_t c : capacities_) {
    if (__builtin_add_overflow(total, c, &total)) {
      throw Error(ErrorCode::kInvalidParameter, "capacity sum overflows");
    }
  }
  return total;
}

Instance Augment(const Instance& inst, std::int64_t g) {
  if (g < 1) {
    throw Error(ErrorCode::kInvalidFactor,
                "augmentation factor must be >= 1, got " + std::to_string(g));
  }
  std::vector<std::int64_t> caps = inst.capacities();
  for (auto& c : caps) c = CheckedMul(c, g);
  return Instance(inst.metric(), inst.agents(), inst.facilities(),
                  std::move(caps));
}

Instance WithAgentPoint(const Instance& inst, std::size_t agent, PointId point) {
  if (agent >= inst.num_agents()) {
    throw Error(ErrorCode::kInvalidParameter, "agent index out of range");
  }
  inst.metric().CheckPoint(point);
  Instance out = inst;
  out.agents_[agent] = point;
  return out;
}

std::string FamilyName(const Family& f) {
  struct Visitor {
    std::string operator()(const SdLowerBound&) const { return "sd-lb"; }
    std::string operator()(const RsdLowerBound&) const { return "rsd-lb"; }
    std::string operator()(const TwoFacilitySd&) const { return "two-sd"; }
    std::string operator()(const TwoFacilityAnonymous&) const {
      return "two-anon";
    }
  };
  return std::visit(Visitor{}, f);
}

LevelInstance GenerateLevels(std::span<const std::int64_t> level_sizes,
                             std::span<const std::int64_t> capacities,
                             double eps) {
  RequirePositiveFinite(eps, "eps");
  const std::size_t k = level_sizes.size();
  if (k == 0 || k > 60) {
    throw Error(ErrorCode::kInvalidParameter, "need 1 <= k <= 60 levels");
  }
  if (capacities.size() != k + 1) {
    throw Error(ErrorCode::kInvalidParameter,
                "need one capacity per facility level (k + 1)");
  }
  std::int64_t total = 0;
  for (const std::int64_t l : level_sizes) {
    if (l <= 0) throw Error(ErrorCode::kInvalidParameter, "empty level");
    if (__builtin_add_overflow(total, l, &total) || total > kMaxGeneratedAgents) {
      throw Error(ErrorCode::kInvalidParameter, "too many agents");
    }
  }

  // Point 0 is -eps, point i + 1 is 2^i for i = 0..k.
  std::vector<double> coords;
  coords.reserve(k + 2);
  coords.push_back(-eps);
  for (std::size_t i = 0; i <= k; ++i) coords.push_back(std::ldexp(1.0, static_cast<int>(i)));

  std::vector<PointId> agents;
  std::vector<std::size_t> agent_level;
  agents.reserve(static_cast<std::size_t>(total));
  agent_level.reserve(static_cast<std::size_t>(total));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::int64_t a = 0; a < level_sizes[i]; ++a) {
      agents.push_back(PointId{i + 1});
      agent_level.push_back(i);
    }
  }
  std::vector<PointId> facilities;
  std::vector<std::size_t> facility_level;
  facilities.push_back(PointId{0});
  facility_level.push_back(0);
  for (std::size_t i = 1; i <= k; ++i) {
    facilities.push_back(PointId{i + 1});
    facility_level.push_back(i);
  }

  return LevelInstance{
      Instance(Metric::FromLine(std::move(coords)), std::move(agents),
               std::move(facilities),
               std::vector<std::int64_t>(capacities.begin(), capacities.end())),
      std::vector<std::int64_t>(level_sizes.begin(), level_sizes.end()),
      std::move(agent_level), std::move(facility_level)};
}

LevelInstance GenerateLevels(const Family& f) {
  if (const auto* sd = std::get_if<SdLowerBound>(&f)) {
    if (sd->g < 1) throw Error(ErrorCode::kInvalidParameter, "g must be >= 1");
    if (sd->k < 1 || sd->k > 60) {
      throw Error(ErrorCode::kInvalidParameter, "k must be in [1, 60]");
    }
    // l_i = c_i = g^(k-i-1) for i < k, c_k = 1.
    std::vector<std::int64_t> levels(static_cast<std::size_t>(sd->k));
    std::vector<std::int64_t> caps(static_cast<std::size_t>(sd->k) + 1);
    for (std::int64_t i = 0; i < sd->k; ++i) {
      levels[i] = CheckedPow(sd->g, sd->k - i - 1);
      caps[i] = levels[i];
    }
    caps.back() = 1;
    return GenerateLevels(levels, caps, sd->eps);
  }
  if (const auto* rsd = std::get_if<RsdLowerBound>(&f)) {
    if (rsd->k < 1 || rsd->k > 38) {
      throw Error(ErrorCode::kInvalidParameter, "k must be in [1, 38]");
    }
    // l_0 = c_0 = 1, l_i = c_i = 1 + 2 * 3^(i-1), c_k = 1.
    std::vector<std::int64_t> levels(static_cast<std::size_t>(rsd->k));
    std::vector<std::int64_t> caps(static_cast<std::size_t>(rsd->k) + 1);
    levels[0] = 1;
    for (std::int64_t i = 1; i < rsd->k; ++i) {
      levels[i] = 1 + CheckedMul(2, CheckedPow(3, i - 1));
    }
    for (std::int64_t i = 0; i < rsd->k; ++i) caps[i] = levels[i];
    caps.back() = 1;
    return GenerateLevels(levels, caps, rsd->eps);
  }
  throw Error(ErrorCode::kInvalidParameter,
              FamilyName(f) + " is not a leveled family");
}

Instance Generate(const Family& f) {
  if (std::holds_alternative<SdLowerBound>(f) ||
      std::holds_alternative<RsdLowerBound>(f)) {
    return GenerateLevels(f).instance;
  }
  if (const auto* two = std::get_if<TwoFacilitySd>(&f)) {
    RequirePositiveFinite(two->delta, "delta");
    if (two->delta >= 1) {
      throw Error(ErrorCode::kInvalidParameter, "delta must be < 1");
    }
    return Instance(Metric::FromLine({0.0, 2.0, 1.0 - two->delta}),
                    {PointId{2}, PointId{0}}, {PointId{0}, PointId{1}}, {1, 1});
  }
  const auto& anon = std::get<TwoFacilityAnonymous>(f);
  RequirePositiveFinite(anon.eps, "eps");
  if (anon.n < 2 || anon.n > kMaxGeneratedAgents) {
    throw Error(ErrorCode::kInvalidParameter, "n must be >= 2");
  }
  std::vector<PointId> agents(static_cast<std::size_t>(anon.n - 1), PointId{0});
  agents.push_back(PointId{2});
  return Instance(Metric::FromLine({0.0, 2.0 + anon.eps, 1.0}), std::move(agents),
                  {PointId{0}, PointId{1}}, {anon.n - 1, 1});
}

}  // namespace mechlab
