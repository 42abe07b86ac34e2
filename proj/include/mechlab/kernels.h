// SPDX-License-Identifier: Apache-2.0

// Data-parallel kernels behind the mechanisms module. Each OpenMP kernel has
// a plain serial counterpart in namespace `reference` that the tests compare
// against; the benchmark target times the two side by side.
//
// Determinism: work is cut into chunks whose boundaries depend only on the
// problem size, per-chunk results land in an indexed buffer, and the final
// fold runs serially in chunk order. Thread count never changes a result.

#ifndef MECHLAB_KERNELS_H_
#define MECHLAB_KERNELS_H_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "mechlab/instance.h"

namespace mechlab {

// Serial dictatorship over a precomputed agent x facility distance table and
// augmented capacities. Const and allocation-free per run.
class SdKernel {
 public:
  SdKernel(const Instance& inst, std::int64_t g);

  std::size_t num_agents() const { return n_; }
  std::size_t num_facilities() const { return m_; }
  double cost(std::size_t agent, std::size_t facility) const {
    return dist_[agent * m_ + facility];
  }
  const std::vector<std::int64_t>& capacities() const { return caps_; }

  // Runs SD along `order` and returns the social cost. `residual` must hold
  // num_facilities() entries; `assigned`, when nonempty, receives the
  // facility of every agent.
  double Run(std::span<const std::size_t> order, std::span<std::int64_t> residual,
             std::span<std::size_t> assigned = {}) const;

  // Facility that `agent` receives when it reports a point whose facility
  // distances are `report`, all other agents truthful. Only agents ahead of
  // it in `order` are simulated.
  std::size_t FacilityUnderReport(std::span<const std::size_t> order,
                                  std::size_t agent,
                                  std::span<const double> report,
                                  std::span<std::int64_t> residual) const;

 private:
  std::size_t n_;
  std::size_t m_;
  std::vector<double> dist_;
  std::vector<std::int64_t> caps_;
};

// Permutations per chunk in the enumeration kernels (7!).
inline constexpr std::uint64_t kPermutationChunk = 5040;

std::uint64_t Factorial(std::size_t n);

// Writes the permutation of rank `rank` (lexicographic) into `perm`.
void UnrankPermutation(std::uint64_t rank, std::span<std::size_t> perm);

// Folds visit(perm, acc) over all n! permutations of 0..n-1. `visit` is
// copied once per chunk so it may own scratch buffers. Chunk accumulators
// start from `init` and are merged in chunk order with `combine`.
template <typename Acc, typename Visit, typename Combine>
Acc ReducePermutations(std::size_t n, const Acc& init, const Visit& visit,
                       const Combine& combine) {
  const std::uint64_t total = Factorial(n);
  const std::uint64_t chunks = (total + kPermutationChunk - 1) / kPermutationChunk;
  std::vector<Acc> partial(chunks, init);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
    Visit local = visit;
    std::vector<std::size_t> perm(n);
    const std::uint64_t begin = static_cast<std::uint64_t>(c) * kPermutationChunk;
    const std::uint64_t end = std::min(total, begin + kPermutationChunk);
    UnrankPermutation(begin, perm);
    Acc& acc = partial[c];
    for (std::uint64_t r = begin; r < end; ++r) {
      local(std::span<const std::size_t>(perm), acc);
      std::next_permutation(perm.begin(), perm.end());
    }
  }
  Acc out = init;
  for (const Acc& p : partial) out = combine(out, p);
  return out;
}

// Expected SD social cost over all orderings of the g-augmented instance,
// summed per chunk and divided by n!.
double ExpectedSdCost(const SdKernel& kernel);

// Social cost of SD for each of `samples` random orderings; sample s draws
// its ordering from CounterRng(seed, s).
std::vector<double> SampleSdCosts(const SdKernel& kernel, std::uint64_t samples,
                                  std::uint64_t seed);

struct MisreportOutcome {
  std::size_t agent;
  std::size_t misreport_index;
  double truthful_cost;
  double deviation_cost;
};

// First (agent, misreport) pair, in that lexicographic order, under which an
// agent's true cost strictly drops by misreporting. `report_rows[r]` holds
// the facility distances of misreport r.
std::optional<MisreportOutcome> FindSdMisreport(
    const SdKernel& kernel, std::span<const std::size_t> order,
    std::span<const std::size_t> agents,
    const std::vector<std::vector<double>>& report_rows);

namespace reference {

// Single loop over all permutations with one accumulator.
template <typename Acc, typename Visit>
Acc ReducePermutations(std::size_t n, Acc acc, Visit visit) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  do {
    visit(std::span<const std::size_t>(perm), acc);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return acc;
}

double ExpectedSdCost(const SdKernel& kernel);
std::vector<double> SampleSdCosts(const SdKernel& kernel, std::uint64_t samples,
                                  std::uint64_t seed);
std::optional<MisreportOutcome> FindSdMisreport(
    const SdKernel& kernel, std::span<const std::size_t> order,
    std::span<const std::size_t> agents,
    const std::vector<std::vector<double>>& report_rows);

}  // namespace reference
}  // namespace mechlab

#endif  // MECHLAB_KERNELS_H_
