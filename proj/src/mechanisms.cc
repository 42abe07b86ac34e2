// SPDX-License-Identifier: Apache-2.0

#include "mechlab/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <string>

#include "mechlab/error.h"
#include "mechlab/kernels.h"

namespace mechlab {
namespace {

constexpr std::size_t kMaxEnumerable = 20;

void RequireFactor(std::int64_t g) {
  if (g < 1) {
    throw Error(ErrorCode::kInvalidFactor,
                "augmentation factor must be >= 1, got " + std::to_string(g));
  }
}

void RequireGuard(std::size_t n, std::optional<std::size_t> guard) {
  const std::size_t limit = guard ? std::min(*guard, kMaxEnumerable) : EnumerationGuard();
  if (n > limit) {
    throw Error(ErrorCode::kGuardExceeded,
                "exhaustive enumeration needs n <= " + std::to_string(limit) +
                    " (n = " + std::to_string(n) +
                    "); use sampling or raise MECHLAB_GUARD_N");
  }
}

void RequireOrderSize(const Instance& inst, const Ordering& order) {
  if (order.size() != inst.num_agents()) {
    throw Error(ErrorCode::kInvalidOrdering,
                "ordering has " + std::to_string(order.size()) + " entries for " +
                    std::to_string(inst.num_agents()) + " agents");
  }
}

std::vector<std::vector<double>> ReportRows(const Instance& inst,
                                            std::span<const PointId> misreports) {
  std::vector<std::vector<double>> rows;
  rows.reserve(misreports.size());
  for (const PointId p : misreports) {
    inst.metric().CheckPoint(p);
    std::vector<double> row(inst.num_facilities());
    for (std::size_t j = 0; j < row.size(); ++j) {
      row[j] = inst.metric().distance_unchecked(p.index, inst.facilities()[j].index);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::optional<TruthfulnessViolation> ToViolation(
    const std::optional<MisreportOutcome>& m, std::span<const PointId> misreports) {
  if (!m) return std::nullopt;
  return TruthfulnessViolation{m->agent, misreports[m->misreport_index],
                               m->truthful_cost, m->deviation_cost};
}

}  // namespace

Ordering::Ordering(std::vector<std::size_t> perm) : perm_(std::move(perm)) {
  std::vector<bool> seen(perm_.size(), false);
  for (const std::size_t i : perm_) {
    if (i >= perm_.size() || seen[i]) {
      throw Error(ErrorCode::kInvalidOrdering,
                  "ordering is not a permutation of 0.." +
                      std::to_string(perm_.size()) + "-1");
    }
    seen[i] = true;
  }
}

Ordering Ordering::Identity(std::size_t n) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  return Ordering(std::move(perm));
}

Ordering Ordering::Reversed() const {
  return Ordering(std::vector<std::size_t>(perm_.rbegin(), perm_.rend()));
}

Assignment Sd(const Instance& inst, const Ordering& order) {
  RequireOrderSize(inst, order);
  const SdKernel kernel(inst, 1);
  std::vector<std::int64_t> residual(inst.num_facilities());
  std::vector<std::size_t> assigned(inst.num_agents());
  kernel.Run(order.perm(), residual, assigned);
  return MakeAssignment(inst, std::move(assigned));
}

Assignment OnlineGreedy(const Instance& inst, const Ordering& arrival,
                        std::int64_t g) {
  return Sd(Augment(inst, g), arrival);
}

RatioReport MakeRatioReport(std::string instance_id, std::string mechanism,
                            std::int64_t g, double sc_mech, double sc_opt) {
  RatioReport r;
  r.instance_id = std::move(instance_id);
  r.mechanism = std::move(mechanism);
  r.g = g;
  r.sc_mech = sc_mech;
  r.sc_opt = sc_opt;
  r.degenerate = sc_opt == 0.0;
  r.ratio = r.degenerate ? std::numeric_limits<double>::quiet_NaN() : sc_mech / sc_opt;
  return r;
}

RatioReport SdAugmentedRatio(const Instance& inst, const Ordering& order,
                             std::int64_t g, std::string instance_id) {
  const Assignment s = OnlineGreedy(inst, order, g);
  return MakeRatioReport(std::move(instance_id), "sd", g, s.cost, OptimalCost(inst));
}

std::size_t EnumerationGuard() {
  const char* env = std::getenv("MECHLAB_GUARD_N");
  if (env == nullptr || *env == '\0') return kDefaultEnumerationGuard;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0' || v == 0) return kDefaultEnumerationGuard;
  return std::min<std::size_t>(static_cast<std::size_t>(v), kMaxEnumerable);
}

double RsdExact(const Instance& inst, std::int64_t g,
                std::optional<std::size_t> guard) {
  RequireFactor(g);
  RequireGuard(inst.num_agents(), guard);
  return ExpectedSdCost(SdKernel(inst, g));
}

SampleEstimate RsdSample(const Instance& inst, std::int64_t g,
                         std::uint64_t samples, std::uint64_t seed) {
  RequireFactor(g);
  if (samples == 0) {
    throw Error(ErrorCode::kInvalidParameter, "samples must be >= 1");
  }
  const std::vector<double> costs = SampleSdCosts(SdKernel(inst, g), samples, seed);
  double sum = 0.0;
  for (const double c : costs) sum += c;
  const double mean = sum / static_cast<double>(samples);
  SampleEstimate est;
  est.mean = mean;
  if (samples > 1) {
    double sq = 0.0;
    for (const double c : costs) sq += (c - mean) * (c - mean);
    const double var = sq / static_cast<double>(samples - 1);
    est.standard_error = std::sqrt(var / static_cast<double>(samples));
  }
  return est;
}

RatioReport RsdAugmentedRatio(const Instance& inst, std::int64_t g,
                              std::string instance_id,
                              std::optional<std::size_t> guard) {
  const double expected = RsdExact(inst, g, guard);
  return MakeRatioReport(std::move(instance_id), "rsd", g, expected,
                         OptimalCost(inst));
}

std::optional<TruthfulnessViolation> CheckTruthful(
    const Instance& inst, const Ordering& order, std::size_t agent,
    std::span<const PointId> misreports, const Mechanism& mech) {
  RequireOrderSize(inst, order);
  if (agent >= inst.num_agents()) {
    throw Error(ErrorCode::kInvalidParameter, "agent index out of range");
  }
  const Assignment truthful = mech(inst, order);
  const double truth_cost = inst.cost(agent, truthful.assigned[agent]);
  for (const PointId p : misreports) {
    const Assignment dev = mech(WithAgentPoint(inst, agent, p), order);
    const double dev_cost = inst.cost(agent, dev.assigned[agent]);
    if (dev_cost < truth_cost) {
      return TruthfulnessViolation{agent, p, truth_cost, dev_cost};
    }
  }
  return std::nullopt;
}

std::optional<TruthfulnessViolation> CheckSdTruthful(
    const Instance& inst, const Ordering& order, std::size_t agent,
    std::span<const PointId> misreports) {
  RequireOrderSize(inst, order);
  if (agent >= inst.num_agents()) {
    throw Error(ErrorCode::kInvalidParameter, "agent index out of range");
  }
  const std::size_t agents[] = {agent};
  return ToViolation(FindSdMisreport(SdKernel(inst, 1), order.perm(), agents,
                                     ReportRows(inst, misreports)),
                     misreports);
}

std::optional<TruthfulnessViolation> CheckSdTruthfulAll(
    const Instance& inst, const Ordering& order,
    std::span<const PointId> misreports) {
  RequireOrderSize(inst, order);
  std::vector<std::size_t> agents(inst.num_agents());
  std::iota(agents.begin(), agents.end(), std::size_t{0});
  return ToViolation(FindSdMisreport(SdKernel(inst, 1), order.perm(), agents,
                                     ReportRows(inst, misreports)),
                     misreports);
}

std::vector<PointId> FacilityPoints(const Instance& inst) {
  std::vector<PointId> out;
  for (const PointId p : inst.facilities()) {
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  }
  return out;
}

Rational ChainOfLevelsProbability(std::span<const std::int64_t> level_sizes) {
  if (level_sizes.empty()) {
    throw Error(ErrorCode::kInvalidParameter, "need at least one level");
  }
  Rational p = 1;
  Rational prefix = 0;
  for (std::size_t i = 0; i < level_sizes.size(); ++i) {
    if (level_sizes[i] <= 0) {
      throw Error(ErrorCode::kInvalidParameter, "level sizes must be positive");
    }
    const Rational prev = prefix;
    prefix += level_sizes[i];
    if (i > 0) p *= 1 - prev / prefix;
  }
  return p;
}

bool HasChainOfLevels(std::span<const std::size_t> order,
                      std::span<const std::size_t> agent_level,
                      std::size_t num_levels) {
  // Holds iff the last position of each level increases strictly with level.
  std::vector<std::size_t> last(num_levels, 0);
  std::vector<bool> seen(num_levels, false);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t lvl = agent_level[order[pos]];
    last[lvl] = pos;
    seen[lvl] = true;
  }
  for (std::size_t i = 0; i < num_levels; ++i) {
    if (!seen[i]) return false;
    if (i > 0 && last[i] <= last[i - 1]) return false;
  }
  return true;
}

bool LevelCascadeHolds(const LevelInstance& li,
                       std::span<const std::size_t> assigned) {
  const std::size_t k = li.level_sizes.size();
  std::vector<bool> hit(k, false);
  for (std::size_t a = 0; a < assigned.size(); ++a) {
    const std::size_t lvl = li.agent_level[a];
    if (li.facility_level[assigned[a]] == lvl + 1) hit[lvl] = true;
  }
  return std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
}

namespace {

struct ChainVisit {
  const LevelInstance* li;
  const SdKernel* kernel;
  std::vector<std::int64_t> residual;
  std::vector<std::size_t> assigned;

  void operator()(std::span<const std::size_t> perm, ChainCensus& acc) {
    ++acc.orderings;
    if (!HasChainOfLevels(perm, li->agent_level, li->level_sizes.size())) return;
    ++acc.chains;
    kernel->Run(perm, residual, assigned);
    if (!LevelCascadeHolds(*li, assigned)) ++acc.cascade_failures;
  }
};

}  // namespace

ChainCensus EnumerateChains(const LevelInstance& li,
                            std::optional<std::size_t> guard) {
  const std::size_t n = li.instance.num_agents();
  RequireGuard(n, guard);
  const SdKernel kernel(li.instance, 1);
  return ReducePermutations(
      n, ChainCensus{},
      ChainVisit{&li, &kernel, std::vector<std::int64_t>(kernel.num_facilities()),
                 std::vector<std::size_t>(n)},
      [](ChainCensus a, const ChainCensus& b) {
        a.orderings += b.orderings;
        a.chains += b.chains;
        a.cascade_failures += b.cascade_failures;
        return a;
      });
}

}  // namespace mechlab
