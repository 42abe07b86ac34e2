// SPDX-License-Identifier: Apache-2.0

#ifndef MECHLAB_MECHANISMS_H_
#define MECHLAB_MECHANISMS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mechlab/instance.h"
#include "mechlab/matching.h"
#include "mechlab/rational.h"

namespace mechlab {

// A permutation of agent indices 0..n-1. Throws kInvalidOrdering otherwise.
class Ordering {
 public:
  explicit Ordering(std::vector<std::size_t> perm);

  static Ordering Identity(std::size_t n);

  const std::vector<std::size_t>& perm() const { return perm_; }
  std::size_t size() const { return perm_.size(); }
  Ordering Reversed() const;

  friend bool operator==(const Ordering&, const Ordering&) = default;

 private:
  std::vector<std::size_t> perm_;
};

// Serial dictatorship on `inst` as given (augment first for I_g): agents in
// `order` take the nearest facility with residual capacity, lowest index on
// ties.
Assignment Sd(const Instance& inst, const Ordering& order);

// Greedy for online transportation with adversarial arrivals; identical to
// Sd(Augment(inst, g), arrival).
Assignment OnlineGreedy(const Instance& inst, const Ordering& arrival,
                        std::int64_t g);

struct RatioReport {
  std::string instance_id;
  std::string mechanism;
  std::int64_t g = 1;
  double sc_mech = 0.0;
  double sc_opt = 0.0;
  double ratio = 0.0;      // NaN when degenerate
  bool degenerate = false;  // sc_opt == 0
};

RatioReport MakeRatioReport(std::string instance_id, std::string mechanism,
                            std::int64_t g, double sc_mech, double sc_opt);

// SC_SD(I_g) / SC_OPT(I).
RatioReport SdAugmentedRatio(const Instance& inst, const Ordering& order,
                             std::int64_t g, std::string instance_id = "");

// Largest n accepted by exhaustive enumeration: MECHLAB_GUARD_N when set to
// a positive integer, 9 otherwise. Values above 20 are clamped (n! must fit
// in 64 bits).
std::size_t EnumerationGuard();

inline constexpr std::size_t kDefaultEnumerationGuard = 9;

// Expected SD cost on I_g over all n! orderings. `guard` overrides
// EnumerationGuard(). Throws kGuardExceeded when n exceeds the guard.
double RsdExact(const Instance& inst, std::int64_t g,
                std::optional<std::size_t> guard = std::nullopt);

struct SampleEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

// Monte Carlo RSD: sample s shuffles with CounterRng(seed, s). samples >= 1.
SampleEstimate RsdSample(const Instance& inst, std::int64_t g,
                         std::uint64_t samples, std::uint64_t seed);

// E[SC_SD(I_g)] / SC_OPT(I) with the exact expectation.
RatioReport RsdAugmentedRatio(const Instance& inst, std::int64_t g,
                              std::string instance_id = "",
                              std::optional<std::size_t> guard = std::nullopt);

// A mechanism maps an instance (with possibly misreported points) and an
// ordering to an assignment.
using Mechanism = std::function<Assignment(const Instance&, const Ordering&)>;

struct TruthfulnessViolation {
  std::size_t agent;
  PointId misreport;
  double truthful_cost;
  double deviation_cost;
};

// Reruns `mech` with the agent's point replaced by each misreport and
// reports the first one that strictly lowers the agent's true distance.
std::optional<TruthfulnessViolation> CheckTruthful(
    const Instance& inst, const Ordering& order, std::size_t agent,
    std::span<const PointId> misreports, const Mechanism& mech);

// Same check for SD through the precomputed kernel.
std::optional<TruthfulnessViolation> CheckSdTruthful(
    const Instance& inst, const Ordering& order, std::size_t agent,
    std::span<const PointId> misreports);

// Every agent against every misreport; first violation in (agent, misreport)
// order.
std::optional<TruthfulnessViolation> CheckSdTruthfulAll(
    const Instance& inst, const Ordering& order,
    std::span<const PointId> misreports);

// Distinct facility points in first-seen order.
std::vector<PointId> FacilityPoints(const Instance& inst);

// prod_{i=1}^{k-1} (1 - n_{i-1} / n_i) with n_i the prefix sums of
// level_sizes. Throws kInvalidParameter on an empty or nonpositive profile.
Rational ChainOfLevelsProbability(std::span<const std::int64_t> level_sizes);

// For every level i >= 1, some level-i agent comes after all agents of
// lower levels.
bool HasChainOfLevels(std::span<const std::size_t> order,
                      std::span<const std::size_t> agent_level,
                      std::size_t num_levels);

// For every level i < k, some level-i agent holds the level-(i + 1)
// facility.
bool LevelCascadeHolds(const LevelInstance& li,
                       std::span<const std::size_t> assigned);

struct ChainCensus {
  std::uint64_t orderings = 0;
  std::uint64_t chains = 0;
  // Chain orderings whose SD run (g = 1) breaks the cascade.
  std::uint64_t cascade_failures = 0;
};

// Exhaustive pass over all orderings of a leveled instance.
ChainCensus EnumerateChains(const LevelInstance& li,
                            std::optional<std::size_t> guard = std::nullopt);

}  // namespace mechlab

#endif  // MECHLAB_MECHANISMS_H_
