// SPDX-License-Identifier: Apache-2.0

#include <omp.h>

#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "mechlab/error.h"
#include "mechlab/kernels.h"
#include "mechlab/mechanisms.h"
#include "test_util.h"

namespace mechlab {
namespace {

TEST(Permutations, UnrankFollowsLexicographicOrder) {
  std::vector<std::size_t> expect(5), got(5);
  std::iota(expect.begin(), expect.end(), std::size_t{0});
  for (std::uint64_t r = 0; r < 120; ++r) {
    UnrankPermutation(r, got);
    ASSERT_EQ(got, expect) << r;
    std::next_permutation(expect.begin(), expect.end());
  }
  EXPECT_EQ(Factorial(0), 1u);
  EXPECT_EQ(Factorial(20), 2432902008176640000ULL);
  EXPECT_THROW(Factorial(21), Error);
}

TEST(Permutations, ParallelFoldVisitsEachPermutationOnce) {
  // n = 8 spans several chunks; hash every permutation and count them.
  auto visit = [](std::span<const std::size_t> p, std::uint64_t& acc) {
    std::uint64_t h = 0;
    for (std::size_t v : p) h = h * 8 + v;
    acc += h * h;
  };
  const std::uint64_t par =
      ReducePermutations(8, std::uint64_t{0}, visit, std::plus<std::uint64_t>());
  const std::uint64_t ser = reference::ReducePermutations(8, std::uint64_t{0}, visit);
  EXPECT_EQ(par, ser);
  const std::uint64_t count = ReducePermutations(
      8, std::uint64_t{0}, [](std::span<const std::size_t>, std::uint64_t& a) { ++a; },
      std::plus<std::uint64_t>());
  EXPECT_EQ(count, 40320u);
}

TEST(Kernels, ExpectedCostMatchesSerialReference) {
  std::mt19937_64 rng(21);
  for (int it = 0; it < 40; ++it) {
    const auto c = testing::RandomLineCase(rng, 8);
    for (std::int64_t g : {1, 3}) {
      const SdKernel k(c.instance, g);
      const double par = ExpectedSdCost(k);
      const double ser = reference::ExpectedSdCost(k);
      EXPECT_NEAR(par, ser, 1e-12 * std::max(1.0, ser));
    }
  }
}

TEST(Kernels, ResultsIndependentOfThreadCount) {
  const Instance inst = Generate(RsdLowerBound{2, 0.01});
  const SdKernel k(inst, 1);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const double e1 = ExpectedSdCost(k);
  const auto s1 = SampleSdCosts(k, 5000, 9);
  omp_set_num_threads(4);
  const double e4 = ExpectedSdCost(k);
  const auto s4 = SampleSdCosts(k, 5000, 9);
  omp_set_num_threads(saved);
  EXPECT_EQ(e1, e4);
  EXPECT_EQ(s1, s4);
}

TEST(Kernels, SamplesMatchSerialReferenceBitwise) {
  std::mt19937_64 rng(22);
  for (int it = 0; it < 20; ++it) {
    const auto c = testing::RandomLineCase(rng);
    const SdKernel k(c.instance, 2);
    EXPECT_EQ(SampleSdCosts(k, 3000, it), reference::SampleSdCosts(k, 3000, it));
  }
}

TEST(Kernels, RunMatchesMechanism) {
  std::mt19937_64 rng(23);
  for (int it = 0; it < 100; ++it) {
    const auto c = testing::RandomLineCase(rng);
    const SdKernel k(c.instance, 2);
    std::vector<std::int64_t> residual(k.num_facilities());
    std::vector<std::size_t> assigned(k.num_agents());
    const double cost = k.Run(c.order.perm(), residual, assigned);
    const Assignment a = OnlineGreedy(c.instance, c.order, 2);
    EXPECT_EQ(assigned, a.assigned);
    EXPECT_NEAR(cost, a.cost, 1e-12);
  }
}

// A kernel-level misreport search on a broken distance table must find the
// same first violation serially and in parallel.
TEST(Kernels, MisreportSearchMatchesSerialReference) {
  std::mt19937_64 rng(24);
  for (int it = 0; it < 100; ++it) {
    const auto c = testing::RandomLineCase(rng);
    const SdKernel k(c.instance, 1);
    std::vector<std::size_t> agents(k.num_agents());
    std::iota(agents.begin(), agents.end(), std::size_t{0});
    // Report rows: every point, plus rows that reverse the true preference.
    std::vector<std::vector<double>> rows;
    for (std::size_t p = 0; p < c.instance.metric().size(); ++p) {
      std::vector<double> row;
      for (PointId f : c.instance.facilities()) {
        row.push_back(c.instance.metric().distance(PointId{p}, f));
      }
      rows.push_back(row);
      for (double& d : row) d = -d;
      rows.push_back(row);
    }
    const auto par = FindSdMisreport(k, c.order.perm(), agents, rows);
    const auto ser = reference::FindSdMisreport(k, c.order.perm(), agents, rows);
    ASSERT_EQ(par.has_value(), ser.has_value());
    if (par) {
      EXPECT_EQ(par->agent, ser->agent);
      EXPECT_EQ(par->misreport_index, ser->misreport_index);
      EXPECT_LT(par->deviation_cost, par->truthful_cost);
    }
  }
}

}  // namespace
}  // namespace mechlab
