// SPDX-License-Identifier: Apache-2.0

// Acceptance suite. Prints one [PASS]/[FAIL] line per criterion and exits
// nonzero when any selected criterion fails. Arguments select criteria by
// number; no arguments runs all of them.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mechlab/cli.h"
#include "mechlab/covering.h"
#include "mechlab/error.h"
#include "mechlab/gtree.h"
#include "mechlab/io.h"
#include "mechlab/matching.h"
#include "mechlab/mechanisms.h"
#include "test_util.h"

namespace mechlab::acceptance {
namespace {

// Pinned tolerances and budgets.
constexpr double kRelTol = 1e-3;          // criteria 1, 2
constexpr double kBoundSlack = 1e-9;      // upper-bound comparisons
constexpr double kRsdFloor = 1.7777;      // criterion 6, (4/3)^2 - 1e-4
constexpr double kRsdRelTol = 1e-4;       // criterion 6, power-law form
constexpr double kTreeTol = 1e-9;         // criterion 8, g = 2
constexpr double kTwoFacilityTol = 1e-3;  // criterion 11
constexpr double kBudget1 = 1.0, kBudget2 = 1.0, kBudget3 = 10.0, kBudget4 = 30.0,
                 kBudget6 = 60.0, kBudget8 = 10.0;
constexpr std::uint64_t kRandomSeed = 20261014;
constexpr int kRandomInstances = 1000;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Timer {
 public:
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string Fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string Fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Triplet {
  std::string source;
  Instance instance;
  Ordering order;
  std::int64_t g;
};

double SdRatio(const Instance& inst, const Ordering& order, std::int64_t g) {
  return OnlineGreedy(inst, order, g).cost / OptimalCost(inst);
}

std::vector<Triplet> FamilyTriplets(const std::string& source, std::int64_t g,
                                    std::int64_t k_lo, std::int64_t k_hi) {
  std::vector<Triplet> out;
  for (std::int64_t k = k_lo; k <= k_hi; ++k) {
    Instance inst = Generate(SdLowerBound{g, k, 1e-6});
    Ordering order = Ordering::Identity(inst.num_agents());
    out.push_back({source, std::move(inst), std::move(order), g});
  }
  return out;
}

std::vector<testing::RandomCase> RandomCases() {
  std::mt19937_64 rng(kRandomSeed);
  std::vector<testing::RandomCase> out;
  for (int i = 0; i < kRandomInstances; ++i) out.push_back(testing::RandomLineCase(rng, 7));
  return out;
}

double UpperBound(std::int64_t g, std::size_t n) {
  return cli::SdRatioBound(g, static_cast<std::int64_t>(n));
}

// Rows of a level-family sweep against `target(row)` within relative tol.
Outcome SweepWithin(std::int64_t g, std::int64_t k_hi,
                    const std::function<double(const cli::ReportRow&)>& target, double budget) {
  Timer timer;
  const auto rows = cli::Sweep("sd-lb", g, g, 1, k_hi, 1e-6, 1e-6, 2, "sd");
  const double secs = timer.Seconds();
  double worst = 0.0;
  std::ostringstream ratios;
  for (const auto& r : rows) {
    worst = std::max(worst, std::abs(r.ratio - target(r)) / target(r));
    ratios << (ratios.tellp() ? "," : "") << Format12(r.ratio);
  }
  Outcome o;
  o.pass = worst <= kRelTol && secs < budget;
  o.detail = Fmt("ratios=[%s] max_rel_err=%.3g (tol %.0e) time=%.3fs (budget %.0fs)",
                 ratios.str().c_str(), worst, kRelTol, secs, budget);
  return o;
}

Outcome Criterion1() {
  return SweepWithin(
      1, 8, [](const cli::ReportRow& r) { return std::ldexp(1.0, static_cast<int>(*r.k)) - 1; },
      kBudget1);
}

Outcome Criterion2() {
  return SweepWithin(
      2, 6, [](const cli::ReportRow& r) { return std::log2(static_cast<double>(r.n) + 1); },
      kBudget2);
}

Outcome Criterion3() {
  Timer timer;
  const Instance i3 = Generate(SdLowerBound{3, 10, 1e-6});
  const double r3 = SdRatio(i3, Ordering::Identity(i3.num_agents()), 3);
  const Instance i4 = Generate(SdLowerBound{4, 10, 1e-6});
  const double r4 = SdRatio(i4, Ordering::Identity(i4.num_agents()), 4);
  const double secs = timer.Seconds();
  const double lo4 = 2.0 - 2.0 * std::pow(0.5, 10) - 1e-3;
  Outcome o;
  o.pass = i3.num_agents() == 29524 && r3 >= 2.94 && r3 <= 3.0 && r4 <= 2.0 && r4 >= lo4 &&
           secs < kBudget3;
  o.detail = Fmt("g=3 n=%zu ratio=%.9f in [2.94, 3]; g=4 n=%zu ratio=%.9f in [%.6f, 2]; "
                 "time=%.3fs (budget %.0fs)",
                 i3.num_agents(), r3, i4.num_agents(), r4, lo4, secs, kBudget3);
  return o;
}

Outcome Criterion4() {
  Timer timer;
  const auto cases = RandomCases();
  std::map<std::int64_t, int> violations;
  std::map<std::int64_t, double> worst_slack;
  int checked = 0;
  for (const auto& c : cases) {
    const double opt = OptimalCost(c.instance);
    for (std::int64_t g = 1; g <= 5; ++g) {
      const double sd = OnlineGreedy(c.instance, c.order, g).cost;
      const double bound = UpperBound(g, c.instance.num_agents());
      if (opt == 0.0) {
        violations[g] += sd > 0.0;
        continue;
      }
      ++checked;
      const double slack = bound - sd / opt;
      if (!worst_slack.count(g) || slack < worst_slack[g]) worst_slack[g] = slack;
      violations[g] += slack < -kBoundSlack;
    }
  }
  const double secs = timer.Seconds();
  int total = 0;
  std::ostringstream per_g;
  for (std::int64_t g = 1; g <= 5; ++g) {
    total += violations[g];
    per_g << Fmt(" g=%lld:%d(min slack %.4g)", static_cast<long long>(g), violations[g],
                 worst_slack[g]);
  }
  Outcome o;
  o.pass = total == 0 && secs < kBudget4;
  o.detail = Fmt("%d instances, %d ratios, violations%s; time=%.3fs (budget %.0fs)",
                 kRandomInstances, checked, per_g.str().c_str(), secs, kBudget4);
  return o;
}

Outcome Criterion5() {
  const auto cases = RandomCases();
  int checked = 0, violations = 0;
  double worst = 0.0;
  for (const auto& c : cases) {
    const double opt = OptimalCost(c.instance);
    if (opt <= 0.0) continue;
    ++checked;
    const double n = static_cast<double>(c.instance.num_agents());
    const double rsd = RsdExact(c.instance, 1);
    worst = std::max(worst, rsd / (n * opt));
    violations += rsd > n * opt + kBoundSlack;
  }
  Outcome o;
  o.pass = violations == 0;
  o.detail = Fmt("%d instances with OPT > 0, violations=%d, max rsd/(n*opt)=%.6f", checked,
                 violations, worst);
  return o;
}

Outcome Criterion6() {
  Timer timer;
  const LevelInstance li = GenerateLevels(RsdLowerBound{3, 1e-6});
  const std::size_t n = li.instance.num_agents();
  const double expected = RsdExact(li.instance, 1, n);
  const double secs = timer.Seconds();
  const double power = std::pow(static_cast<double>(n), std::log(4.0 / 3.0) / std::log(3.0)) *
                       (1 - kRsdRelTol);
  Outcome o;
  o.pass = expected >= kRsdFloor && expected >= power && secs < kBudget6;
  o.detail = Fmt("n=%zu (levels 1,3,7), %zu! orderings, E[SC]=%.9f >= %.4f and >= "
                 "n^log3(4/3)*(1-1e-4)=%.6f; time=%.3fs (budget %.0fs)",
                 n, n, expected, kRsdFloor, power, secs, kBudget6);
  return o;
}

Outcome Criterion7() {
  Outcome o;
  std::ostringstream d;
  for (const std::vector<std::int64_t>& sizes :
       {std::vector<std::int64_t>{1, 3}, std::vector<std::int64_t>{1, 3, 5}}) {
    std::vector<std::int64_t> caps(sizes.begin(), sizes.end());
    caps.push_back(1);
    const LevelInstance li = GenerateLevels(sizes, caps, 1e-6);
    const ChainCensus census = EnumerateChains(li);
    const Rational freq(census.chains, census.orderings);
    const Rational formula = ChainOfLevelsProbability(sizes);
    const bool ok = freq == formula && census.cascade_failures == 0;
    o.pass = o.pass && ok;
    d << (d.tellp() ? "; " : "") << "levels(";
    for (std::size_t i = 0; i < sizes.size(); ++i) d << (i ? "," : "") << sizes[i];
    d << "): " << census.chains << "/" << census.orderings << " = " << ToString(freq)
      << " vs formula " << ToString(formula) << ", cascade failures "
      << census.cascade_failures;
  }
  o.detail = d.str();
  return o;
}

Outcome Criterion8() {
  Timer timer;
  Outcome o;
  std::ostringstream d;
  for (std::int64_t g : {1, 2, 3, 4, 5}) {
    const auto shapes = testing::EnumerateTreeShapes(g, 15);
    int bad = 0;
    double worst_g2 = 0.0;  // most negative margin against either g = 2 bound
    for (const auto& parent : shapes) {
      const DirectedGTree t = DirectedGTree::FromParents(g, parent);
      if (g == 1) {
        const ExactCovering x = ConstructG1(t);
        bad += Validate(t, x).has_value();
      } else if (g == 2) {
        const RealCovering x = ConstructG2(t);
        bad += Validate(t, x).has_value();
        const double log_n = std::log2(static_cast<double>(t.num_nodes()));
        const auto cross = CrossingSums(t, x);
        const auto sub = SubtreeNodeCounts(t);
        bool ok = Cost(t, x) <= log_n + kTreeTol;
        for (std::size_t e = 0; e < t.num_edges(); ++e) {
          const double lo = log_n - std::log2(static_cast<double>(sub[e])) + 1;
          worst_g2 = std::min({worst_g2, log_n - cross[e], cross[e] - lo});
          ok = ok && cross[e] <= log_n + kTreeTol && cross[e] >= lo - kTreeTol;
        }
        bad += !ok;
      } else {
        const ExactCovering x = ConstructG3Plus(t);
        bool ok = !Validate(t, x).has_value();
        for (const Rational& s : CrossingSums(t, x)) ok = ok && s == Rational(g, g - 2);
        bad += !ok;
      }
    }
    o.pass = o.pass && bad == 0;
    d << Fmt("%sg=%lld: %zu trees, %d failing", d.tellp() ? "; " : "",
             static_cast<long long>(g), shapes.size(), bad);
    if (g == 2) d << Fmt(" (worst margin %.3g)", worst_g2);
  }
  const double secs = timer.Seconds();
  o.pass = o.pass && secs < kBudget8;
  o.detail = d.str() + Fmt("; time=%.3fs (budget %.0fs)", secs, kBudget8);
  return o;
}

DualityReport CheckTree(const DirectedGTree& t) {
  if (t.g() == 1) return DualityBoundCheck(t, ConstructG1(t));
  if (t.g() == 2) return DualityBoundCheck(t, ConstructG2(t));
  return DualityBoundCheck(t, ConstructG3Plus(t));
}

Outcome Criterion9() {
  std::vector<Triplet> triplets;
  for (auto&& v : {FamilyTriplets("c1", 1, 1, 8), FamilyTriplets("c2", 2, 1, 6),
                   FamilyTriplets("c3", 3, 10, 10), FamilyTriplets("c3", 4, 10, 10)}) {
    triplets.insert(triplets.end(), v.begin(), v.end());
  }
  for (const auto& c : RandomCases()) {
    for (std::int64_t g = 1; g <= 5; ++g) triplets.push_back({"c4", c.instance, c.order, g});
  }

  std::map<std::string, std::map<std::int64_t, int>> failures;
  int trees = 0, errors = 0, total_failures = 0;
  std::string first;
  for (const auto& tr : triplets) {
    try {
      const Forest f = ReduceTriplet(tr.instance, tr.order, tr.g);
      for (const auto& t : f.trees) {
        ++trees;
        const DualityReport r = CheckTree(t);
        if (r.holds) continue;
        ++failures[tr.source][tr.g];
        ++total_failures;
        if (first.empty()) {
          first = Fmt("first: %s g=%lld tree sd=%.6g opt=%.6g cost=%.6g", tr.source.c_str(),
                      static_cast<long long>(tr.g), r.sd_cost, r.opt_cost, r.covering_cost);
        }
      }
    } catch (const Error& e) {
      ++errors;
      if (first.empty()) first = std::string("first error: ") + e.what();
    }
  }
  std::ostringstream by;
  for (const auto& [src, per_g] : failures) {
    for (const auto& [g, count] : per_g) {
      by << Fmt(" %s/g=%lld:%d", src.c_str(), static_cast<long long>(g), count);
    }
  }
  Outcome o;
  o.pass = total_failures == 0 && errors == 0;
  o.detail = Fmt("%zu triplets, %d reduced trees, %d duality failures, %d reduction errors",
                 triplets.size(), trees, total_failures, errors);
  if (!o.pass) o.detail += " [" + std::string(by.str().empty() ? "" : by.str().substr(1)) + "]; " + first;
  return o;
}

// Each agent takes the facility farthest from its report.
Assignment FarthestFacility(const Instance& inst, const Ordering& order) {
  std::vector<std::int64_t> left = inst.capacities();
  std::vector<std::size_t> out(inst.num_agents());
  for (std::size_t i : order.perm()) {
    std::size_t pick = 0;
    double worst = -1.0;
    for (std::size_t j = 0; j < inst.num_facilities(); ++j) {
      if (left[j] > 0 && inst.cost(i, j) > worst) {
        worst = inst.cost(i, j);
        pick = j;
      }
    }
    --left[pick];
    out[i] = pick;
  }
  return MakeAssignment(inst, out);
}

Outcome Criterion10() {
  std::vector<std::pair<std::string, Instance>> family;
  const std::map<std::int64_t, std::int64_t> k_max = {{1, 8}, {2, 6}, {3, 6}, {4, 5}};
  for (const auto& [g, kmax] : k_max) {
    for (std::int64_t k = 1; k <= kmax; ++k) {
      family.emplace_back(Fmt("sd-lb g=%lld k=%lld", static_cast<long long>(g),
                              static_cast<long long>(k)),
                          Generate(SdLowerBound{g, k, 1e-6}));
    }
  }
  for (std::int64_t k = 1; k <= 3; ++k) {
    family.emplace_back(Fmt("rsd-lb k=%lld", static_cast<long long>(k)),
                        Generate(RsdLowerBound{k, 1e-6}));
  }
  family.emplace_back("two-sd", Generate(TwoFacilitySd{1e-6}));
  family.emplace_back("two-anon", Generate(TwoFacilityAnonymous{100, 1e-6}));

  int counterexamples = 0;
  std::size_t pairs = 0;
  std::string first;
  for (const auto& [name, inst] : family) {
    const auto reports = FacilityPoints(inst);
    const Ordering fwd = Ordering::Identity(inst.num_agents());
    for (const Ordering& order : {fwd, fwd.Reversed()}) {
      pairs += inst.num_agents() * reports.size();
      if (const auto v = CheckSdTruthfulAll(inst, order, reports)) {
        ++counterexamples;
        if (first.empty()) first = name;
      }
    }
  }
  const Instance control = Generate(TwoFacilitySd{1e-6});
  std::optional<TruthfulnessViolation> caught;
  for (std::size_t i = 0; i < control.num_agents() && !caught; ++i) {
    caught = CheckTruthful(control, Ordering::Identity(2), i, FacilityPoints(control),
                           FarthestFacility);
  }
  Outcome o;
  o.pass = counterexamples == 0 && caught.has_value();
  o.detail = Fmt("%zu family instances x 2 orderings, %zu agent-misreport pairs, "
                 "SD counterexamples=%d%s; broken control caught=%s",
                 family.size(), pairs, counterexamples,
                 first.empty() ? "" : (" (first " + first + ")").c_str(),
                 caught ? "yes" : "no");
  if (caught) {
    o.detail += Fmt(" (agent %zu: %.6g -> %.6g)", caught->agent, caught->truthful_cost,
                    caught->deviation_cost);
  }
  return o;
}

Outcome Criterion11() {
  const Instance two = Generate(TwoFacilitySd{1e-6});
  const double r_two = SdRatio(two, Ordering::Identity(2), 1);
  const Instance anon = InstanceFromJson(
      Json::parse(InstanceToJson(Generate(TwoFacilityAnonymous{100, 1e-6})).dump()));
  const double r_anon = SdRatio(anon, Ordering::Identity(anon.num_agents()), 1);
  Outcome o;
  o.pass = std::abs(r_two - 3.0) <= kTwoFacilityTol && anon.num_agents() == 100 &&
           std::abs(r_anon - 1.0) <= 1e-12;
  o.detail = Fmt("two-sd ratio=%.9f (|r-3| <= %.0e); two-anon n=%zu loaded, SD ratio=%.12g",
                 r_two, kTwoFacilityTol, anon.num_agents(), r_anon);
  return o;
}

struct Criterion {
  int id;
  const char* title;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "SD g=1 lower bound 2^k-1 on sd-lb", Criterion1},
    {2, "SD g=2 ratio log2(n+1) on sd-lb", Criterion2},
    {3, "SD g>=3 bound g/(g-2) on sd-lb k=10", Criterion3},
    {4, "SD upper bounds on random instances", Criterion4},
    {5, "RSD ratio <= n on random instances", Criterion5},
    {6, "RSD lower bound on rsd-lb k=3", Criterion6},
    {7, "chain-of-levels frequency and cascade", Criterion7},
    {8, "path covering certificates on all small g-trees", Criterion8},
    {9, "weak duality on reduced triplets of criteria 1-4", Criterion9},
    {10, "SD truthfulness and broken-mechanism control", Criterion10},
    {11, "two-facility instances", Criterion11},
};

}  // namespace
}  // namespace mechlab::acceptance

int main(int argc, char** argv) {
  using namespace mechlab::acceptance;
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  int failed = 0, ran = 0;
  for (const Criterion& c : kCriteria) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
      continue;
    }
    ++ran;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("[%s] C%d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str());
    std::fflush(stdout);
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion matches the arguments\n");
    return 2;
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
