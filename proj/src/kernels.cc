// SPDX-License-Identifier: Apache-2.0

#include "mechlab/kernels.h"

#include <limits>

#include "mechlab/error.h"
#include "mechlab/rng.h"

namespace mechlab {
namespace {

// Nearest facility with residual capacity; lowest index on ties.
std::size_t PickFacility(const double* row, std::span<const std::int64_t> residual) {
  std::size_t best = residual.size();
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < residual.size(); ++j) {
    if (residual[j] > 0 && (best == residual.size() || row[j] < best_d)) {
      best = j;
      best_d = row[j];
    }
  }
  return best;
}

std::optional<MisreportOutcome> AgentMisreport(
    const SdKernel& kernel, std::span<const std::size_t> order,
    std::size_t agent, const std::vector<std::vector<double>>& report_rows,
    std::vector<std::int64_t>& residual) {
  std::vector<double> truth(kernel.num_facilities());
  for (std::size_t j = 0; j < truth.size(); ++j) truth[j] = kernel.cost(agent, j);
  const double truthful =
      kernel.cost(agent, kernel.FacilityUnderReport(order, agent, truth, residual));
  for (std::size_t r = 0; r < report_rows.size(); ++r) {
    const std::size_t got =
        kernel.FacilityUnderReport(order, agent, report_rows[r], residual);
    const double deviation = kernel.cost(agent, got);
    if (deviation < truthful) {
      return MisreportOutcome{agent, r, truthful, deviation};
    }
  }
  return std::nullopt;
}

void CheckReportRows(const SdKernel& kernel,
                     const std::vector<std::vector<double>>& rows) {
  for (const auto& row : rows) {
    if (row.size() != kernel.num_facilities()) {
      throw Error(ErrorCode::kInvalidParameter,
                  "misreport row needs one distance per facility");
    }
  }
}

}  // namespace

SdKernel::SdKernel(const Instance& inst, std::int64_t g)
    : n_(inst.num_agents()),
      m_(inst.num_facilities()),
      dist_(n_ * m_),
      caps_(Augment(inst, g).capacities()) {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < m_; ++j) dist_[i * m_ + j] = inst.cost(i, j);
  }
}

double SdKernel::Run(std::span<const std::size_t> order,
                     std::span<std::int64_t> residual,
                     std::span<std::size_t> assigned) const {
  std::copy(caps_.begin(), caps_.end(), residual.begin());
  double total = 0.0;
  for (const std::size_t agent : order) {
    const double* row = &dist_[agent * m_];
    const std::size_t j = PickFacility(row, residual.first(m_));
    --residual[j];
    total += row[j];
    if (!assigned.empty()) assigned[agent] = j;
  }
  return total;
}

std::size_t SdKernel::FacilityUnderReport(std::span<const std::size_t> order,
                                          std::size_t agent,
                                          std::span<const double> report,
                                          std::span<std::int64_t> residual) const {
  std::copy(caps_.begin(), caps_.end(), residual.begin());
  for (const std::size_t other : order) {
    if (other == agent) return PickFacility(report.data(), residual.first(m_));
    --residual[PickFacility(&dist_[other * m_], residual.first(m_))];
  }
  throw Error(ErrorCode::kInvalidOrdering, "agent missing from ordering");
}

std::uint64_t Factorial(std::size_t n) {
  if (n > 20) throw Error(ErrorCode::kGuardExceeded, "n! overflows 64 bits");
  std::uint64_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

void UnrankPermutation(std::uint64_t rank, std::span<std::size_t> perm) {
  const std::size_t n = perm.size();
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t f = Factorial(n - 1 - i);
    const auto digit = static_cast<std::size_t>(rank / f);
    rank %= f;
    perm[i] = pool[digit];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(digit));
  }
}

namespace {

struct CostVisit {
  const SdKernel* kernel;
  std::vector<std::int64_t> residual;

  void operator()(std::span<const std::size_t> perm, double& acc) {
    acc += kernel->Run(perm, residual);
  }
};

}  // namespace

double ExpectedSdCost(const SdKernel& kernel) {
  const std::size_t n = kernel.num_agents();
  const double sum = ReducePermutations(
      n, 0.0, CostVisit{&kernel, std::vector<std::int64_t>(kernel.num_facilities())},
      [](double a, double b) { return a + b; });
  return sum / static_cast<double>(Factorial(n));
}

std::vector<double> SampleSdCosts(const SdKernel& kernel, std::uint64_t samples,
                                  std::uint64_t seed) {
  std::vector<double> costs(samples);
  const std::size_t n = kernel.num_agents();
#pragma omp parallel
  {
    std::vector<std::size_t> order(n);
    std::vector<std::int64_t> residual(kernel.num_facilities());
#pragma omp for schedule(static)
    for (std::int64_t s = 0; s < static_cast<std::int64_t>(samples); ++s) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      CounterRng rng(seed, static_cast<std::uint64_t>(s));
      Shuffle(std::span<std::size_t>(order), rng);
      costs[s] = kernel.Run(order, residual);
    }
  }
  return costs;
}

std::optional<MisreportOutcome> FindSdMisreport(
    const SdKernel& kernel, std::span<const std::size_t> order,
    std::span<const std::size_t> agents,
    const std::vector<std::vector<double>>& report_rows) {
  CheckReportRows(kernel, report_rows);
  std::vector<std::optional<MisreportOutcome>> found(agents.size());
#pragma omp parallel
  {
    std::vector<std::int64_t> residual(kernel.num_facilities());
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t a = 0; a < static_cast<std::int64_t>(agents.size()); ++a) {
      found[a] = AgentMisreport(kernel, order, agents[a], report_rows, residual);
    }
  }
  for (auto& f : found) {
    if (f) return f;
  }
  return std::nullopt;
}

namespace reference {

double ExpectedSdCost(const SdKernel& kernel) {
  const std::size_t n = kernel.num_agents();
  const double sum = ReducePermutations(
      n, 0.0, CostVisit{&kernel, std::vector<std::int64_t>(kernel.num_facilities())});
  return sum / static_cast<double>(Factorial(n));
}

std::vector<double> SampleSdCosts(const SdKernel& kernel, std::uint64_t samples,
                                  std::uint64_t seed) {
  std::vector<double> costs;
  costs.reserve(samples);
  std::vector<std::size_t> order(kernel.num_agents());
  std::vector<std::int64_t> residual(kernel.num_facilities());
  for (std::uint64_t s = 0; s < samples; ++s) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    CounterRng rng(seed, s);
    Shuffle(std::span<std::size_t>(order), rng);
    costs.push_back(kernel.Run(order, residual));
  }
  return costs;
}

std::optional<MisreportOutcome> FindSdMisreport(
    const SdKernel& kernel, std::span<const std::size_t> order,
    std::span<const std::size_t> agents,
    const std::vector<std::vector<double>>& report_rows) {
  CheckReportRows(kernel, report_rows);
  std::vector<std::int64_t> residual(kernel.num_facilities());
  for (const std::size_t agent : agents) {
    if (auto f = AgentMisreport(kernel, order, agent, report_rows, residual)) return f;
  }
  return std::nullopt;
}

}  // namespace reference
}  // namespace mechlab
