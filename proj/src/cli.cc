// SPDX-License-Identifier: Apache-2.0

#include "mechlab/cli.h"

#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "mechlab/covering.h"
#include "mechlab/error.h"
#include "mechlab/gtree.h"
#include "mechlab/matching.h"

namespace mechlab::cli {
namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitBadInput = 2;

std::string Describe(const Error& e) {
  return std::string(ErrorCodeName(e.code())) + ": " + e.what();
}

Json ErrorJson(const Error& e) {
  return Json{{"code", std::string(ErrorCodeName(e.code()))}, {"message", e.what()}};
}

void Emit(const Options& opts, std::ostream& out, const Json& j) {
  if (opts.out.empty()) {
    out << j.dump(2) << "\n";
  } else {
    WriteFile(opts.out, j.dump(2) + "\n");
  }
}

void AppendCsv(const Options& opts, const RatioReport& r) {
  if (opts.csv.empty()) return;
  bool fresh = true;
  {
    std::ifstream probe(opts.csv);
    fresh = !probe || probe.peek() == std::ifstream::traits_type::eof();
  }
  std::ofstream csv(opts.csv, std::ios::app);
  if (!csv) throw Error(ErrorCode::kInvalidParameter, "cannot append to " + opts.csv);
  if (fresh) csv << "instance,mech,g,sc_mech,sc_opt,ratio\n";
  csv << r.instance_id << ',' << r.mechanism << ',' << r.g << ',' << Format12(r.sc_mech)
      << ',' << Format12(r.sc_opt) << ',' << Format12(r.ratio) << '\n';
}

Instance LoadInstance(const Options& opts) {
  if (opts.in.empty()) throw Error(ErrorCode::kInvalidParameter, "--in is required");
  return InstanceFromJson(LoadJsonFile(opts.in));
}

Family MakeFamily(const std::string& name, std::int64_t g, std::int64_t k, double eps,
                  double delta, std::int64_t n) {
  if (name == "sd-lb") return SdLowerBound{g, k, eps};
  if (name == "rsd-lb") return RsdLowerBound{k, eps};
  if (name == "two-sd") return TwoFacilitySd{delta};
  if (name == "two-anon") return TwoFacilityAnonymous{n, eps};
  throw Error(ErrorCode::kInvalidParameter, "unknown family '" + name + "'");
}

bool Leveled(const std::string& family) {
  return family == "sd-lb" || family == "rsd-lb";
}

Json ViolationJson(const TruthfulnessViolation& v) {
  return Json{{"agent", v.agent},
              {"misreport", v.misreport.index},
              {"truthful_cost", Round12(v.truthful_cost)},
              {"deviation_cost", Round12(v.deviation_cost)}};
}

// Covering matching the tree's augmentation factor.
struct TreeCovering {
  bool exact;
  ExactCovering exact_covering;
  RealCovering real_covering;
};

TreeCovering Construct(const DirectedGTree& t) {
  if (t.g() == 1) return {true, ConstructG1(t), {}};
  if (t.g() == 2) return {false, {}, ConstructG2(t)};
  return {true, ConstructG3Plus(t), {}};
}

int CmdGen(const Options& opts, std::ostream& out) {
  Emit(opts, out,
       InstanceToJson(Generate(
           MakeFamily(opts.family, opts.g, opts.k, opts.eps, opts.delta, opts.n))));
  return 0;
}

int CmdOpt(const Options& opts, std::ostream& out) {
  Emit(opts, out, AssignmentToJson(Optimal(LoadInstance(opts))));
  return 0;
}

int CmdSd(const Options& opts, std::ostream& out) {
  const Instance inst = LoadInstance(opts);
  const Ordering order = ParseOrdering(opts.order, inst.num_agents());
  const Assignment s = OnlineGreedy(inst, order, opts.g);
  const RatioReport r = SdAugmentedRatio(inst, order, opts.g, opts.in);
  AppendCsv(opts, r);
  Emit(opts, out, Json{{"assignment", AssignmentToJson(s)}, {"report", RatioReportToJson(r)}});
  return 0;
}

int CmdRsd(const Options& opts, std::ostream& out) {
  const Instance inst = LoadInstance(opts);
  if (opts.exact == (opts.samples > 0)) {
    throw Error(ErrorCode::kInvalidParameter, "pass exactly one of --exact or --samples");
  }
  const double sc_opt = OptimalCost(inst);
  Json j{{"mech", "rsd"}, {"g", opts.g}};
  double sc_mech = 0.0;
  if (opts.exact) {
    sc_mech = RsdExact(inst, opts.g);
    j["exact"] = true;
    j["expected_cost"] = Round12(sc_mech);
  } else {
    const SampleEstimate est = RsdSample(inst, opts.g, opts.samples, opts.seed);
    sc_mech = est.mean;
    j["exact"] = false;
    j["samples"] = opts.samples;
    j["seed"] = opts.seed;
    j["mean"] = Round12(est.mean);
    j["standard_error"] = Round12(est.standard_error);
  }
  const RatioReport r = MakeRatioReport(opts.in, "rsd", opts.g, sc_mech, sc_opt);
  j["report"] = RatioReportToJson(r);
  AppendCsv(opts, r);
  Emit(opts, out, j);
  return 0;
}

int CmdRatio(const Options& opts, std::ostream& out) {
  const Instance inst = LoadInstance(opts);
  const std::string mech = opts.mech.empty() ? "sd" : opts.mech;
  RatioReport r;
  if (mech == "sd") {
    r = SdAugmentedRatio(inst, ParseOrdering(opts.order, inst.num_agents()), opts.g, opts.in);
  } else if (mech == "rsd") {
    r = RsdAugmentedRatio(inst, opts.g, opts.in);
  } else {
    throw Error(ErrorCode::kInvalidParameter, "--mech must be sd or rsd");
  }
  AppendCsv(opts, r);
  Emit(opts, out, RatioReportToJson(r));
  return 0;
}

int CmdTruthful(const Options& opts, std::ostream& out) {
  const Instance inst = LoadInstance(opts);
  const Ordering order = ParseOrdering(opts.order, inst.num_agents());
  const std::vector<PointId> misreports = FacilityPoints(inst);
  const auto v = CheckSdTruthfulAll(inst, order, misreports);
  Json j{{"ok", !v.has_value()},
         {"agents", inst.num_agents()},
         {"misreports", misreports.size()}};
  j["violation"] = v ? ViolationJson(*v) : Json(nullptr);
  Emit(opts, out, j);
  return v ? kExitCheckFailed : 0;
}

int CmdGtree(const Options& opts, std::ostream& out) {
  const Instance inst = LoadInstance(opts);
  const Ordering order = ParseOrdering(opts.order, inst.num_agents());
  const Forest forest = ReduceTriplet(inst, order, opts.g);
  Json j = ForestToJson(forest);
  Json summary = Json::array();
  for (const auto& t : forest.trees) {
    summary.push_back(Json{{"edges", t.num_edges()},
                           {"leaves", t.leaf_edges().size()},
                           {"chain", t.leaf_edges().size() == 1},
                           {"sd_cost", Round12(t.sd_cost())},
                           {"opt_cost", Round12(t.opt_cost())},
                           {"ratio", Round12(TreeRatio(t))}});
  }
  j["summary"] = summary;
  Emit(opts, out, j);
  return 0;
}

DirectedGTree LoadTree(const Options& opts) {
  if (opts.tree.empty()) throw Error(ErrorCode::kInvalidParameter, "--tree is required");
  const Json j = LoadJsonFile(opts.tree);
  if (j.contains("components")) {
    const Json& comps = j["components"];
    if (!comps.is_array() || opts.component >= comps.size()) {
      throw Error(ErrorCode::kInvalidParameter,
                  "forest has no component " + std::to_string(opts.component));
    }
    return TreeFromJson(comps[opts.component]);
  }
  return TreeFromJson(j);
}

int CmdCover(const Options& opts, std::ostream& out) {
  const DirectedGTree t = LoadTree(opts);
  if (opts.g_given && opts.g != t.g()) {
    throw Error(ErrorCode::kInvalidParameter,
                "--g " + std::to_string(opts.g) + " does not match the tree's g = " +
                    std::to_string(t.g()));
  }
  const TreeCovering c = Construct(t);
  Emit(opts, out,
       c.exact ? CoveringToJson(t, c.exact_covering) : CoveringToJson(t, c.real_covering));
  return 0;
}

int CmdVerifyCover(const Options& opts, std::ostream& out) {
  const DirectedGTree t = LoadTree(opts);
  if (opts.cover.empty()) throw Error(ErrorCode::kInvalidParameter, "--cover is required");
  const LoadedCovering c = CoveringFromJson(t, LoadJsonFile(opts.cover));
  Json j;
  std::optional<CoveringViolation> v;
  if (c.exact) {
    v = Validate(t, c.exact_covering);
    j["cost"] = ToString(Cost(t, c.exact_covering));
  } else {
    v = Validate(t, c.real_covering);
    j["cost"] = Round12(Cost(t, c.real_covering));
  }
  j["ok"] = !v.has_value();
  j["violation"] = v ? Json(v->Describe()) : Json(nullptr);
  Emit(opts, out, j);
  return v ? kExitCheckFailed : 0;
}

int CmdVerifyAll(const Options& opts, std::ostream& out) {
  Json report;
  try {
    const Instance inst = LoadInstance(opts);
    report = VerifyAll(inst, opts.g, ParseOrdering(opts.order, inst.num_agents()));
  } catch (const Error& e) {
    report = Json{{"ok", false},
                  {"stages", Json::array({Json{{"stage", "load"},
                                               {"ok", false},
                                               {"error", ErrorJson(e)}}})}};
  }
  Emit(opts, out, report);
  return report["ok"].get<bool>() ? 0 : kExitCheckFailed;
}

int CmdSweep(const Options& opts, std::ostream& out) {
  const auto [g_lo, g_hi] = ParseRange(opts.g_range);
  const auto [k_lo, k_hi] = ParseRange(opts.k_range);
  const std::vector<ReportRow> rows = Sweep(opts.family, g_lo, g_hi, k_lo, k_hi,
                                            opts.eps, opts.delta, opts.n, opts.mech);
  std::ostringstream csv;
  csv << kSweepHeader << "\n";
  for (const auto& r : rows) csv << FormatCsvRow(r) << "\n";
  if (opts.out.empty()) {
    out << csv.str();
  } else {
    WriteFile(opts.out, csv.str());
  }
  return 0;
}

}  // namespace

double SdRatioBound(std::int64_t g, std::int64_t n) {
  if (g == 1) return std::ldexp(1.0, static_cast<int>(std::min<std::int64_t>(n, 2000))) - 1.0;
  if (g == 2) return std::log2(static_cast<double>(n) + 1.0);
  return static_cast<double>(g) / static_cast<double>(g - 2);
}

std::vector<ReportRow> Sweep(const std::string& family, std::int64_t g_lo,
                             std::int64_t g_hi, std::int64_t k_lo, std::int64_t k_hi,
                             double eps, double delta, std::int64_t n,
                             const std::string& mech) {
  if (g_lo < 1 || g_hi < g_lo) throw Error(ErrorCode::kInvalidParameter, "bad g range");
  const bool leveled = Leveled(family);
  if (leveled && (k_lo < 1 || k_hi < k_lo)) {
    throw Error(ErrorCode::kInvalidParameter, "bad k range");
  }
  MakeFamily(family, 1, 1, eps, delta, n);  // rejects unknown names early
  const std::string m = !mech.empty() ? mech : (family == "rsd-lb" ? "rsd" : "sd");
  if (m != "sd" && m != "rsd") throw Error(ErrorCode::kInvalidParameter, "mech must be sd or rsd");

  std::vector<ReportRow> rows;
  for (std::int64_t g = g_lo; g <= g_hi; ++g) {
    if (!leveled) {
      ReportRow r;
      r.family = family;
      r.g = g;
      rows.push_back(r);
      continue;
    }
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
      ReportRow r;
      r.family = family;
      r.g = g;
      r.k = k;
      rows.push_back(r);
    }
  }

  std::vector<std::exception_ptr> failures(rows.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(rows.size()); ++i) {
    ReportRow& r = rows[i];
    try {
      // rsd-lb has no augmentation parameter; g only augments the mechanism.
      const Instance inst = Generate(MakeFamily(family, r.g, r.k.value_or(1), eps, delta, n));
      r.n = static_cast<std::int64_t>(inst.num_agents());
      if (m == "sd") {
        r.sc_mech = OnlineGreedy(inst, Ordering::Identity(inst.num_agents()), r.g).cost;
        r.bound = SdRatioBound(r.g, r.n);
      } else {
        try {
          r.sc_mech = RsdExact(inst, r.g);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kGuardExceeded) throw;
          r.skipped = true;
          continue;
        }
        if (r.g == 1) r.bound = static_cast<double>(r.n);
      }
      r.sc_opt = OptimalCost(inst);
      r.ratio = r.sc_opt == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                                : r.sc_mech / r.sc_opt;
      if (r.bound) r.slack = *r.bound - r.ratio;
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return rows;
}

std::string FormatCsvRow(const ReportRow& r) {
  std::ostringstream s;
  s << r.family << ',' << r.g << ',' << (r.k ? std::to_string(*r.k) : "") << ',' << r.n;
  if (r.skipped) {
    s << ",skipped,skipped,skipped,skipped,skipped";
    return s.str();
  }
  s << ',' << Format12(r.sc_mech) << ',' << Format12(r.sc_opt) << ',' << Format12(r.ratio)
    << ',' << (r.bound ? Format12(*r.bound) : "") << ','
    << (r.slack ? Format12(*r.slack) : "");
  return s.str();
}

Json VerifyAll(const Instance& inst, std::int64_t g, const Ordering& order) {
  Json stages = Json::array();
  bool ok = true;
  auto stage = [&](const std::string& name, auto&& body) {
    if (!ok) return;
    Json entry{{"stage", name}};
    try {
      Json detail = body();
      entry["ok"] = detail.value("ok", true);
      detail.erase("ok");
      entry["detail"] = detail;
    } catch (const Error& e) {
      entry["ok"] = false;
      entry["error"] = ErrorJson(e);
    }
    ok = ok && entry["ok"].get<bool>();
    stages.push_back(entry);
  };

  std::optional<Assignment> sd, opt;
  std::optional<RepGraph> rg;
  std::optional<Forest> forest;
  std::vector<TreeCovering> coverings;

  stage("sd", [&] {
    sd = OnlineGreedy(inst, order, g);
    return Json{{"cost", Round12(sd->cost)}};
  });
  stage("optimal", [&] {
    opt = Optimal(inst);
    const RatioReport r = MakeRatioReport("", "sd", g, sd->cost, opt->cost);
    return Json{{"cost", Round12(opt->cost)},
                {"ratio", r.degenerate ? Json(nullptr) : Json(Round12(r.ratio))},
                {"bound", Round12(SdRatioBound(g, static_cast<std::int64_t>(inst.num_agents())))}};
  });
  stage("rep-graph", [&] {
    rg = BuildRepGraph(inst, *opt, *sd, order, g);
    std::size_t loops = 0;
    for (const auto& e : rg->edges) loops += e.from == e.to;
    return Json{{"nodes", rg->nodes.size()}, {"edges", rg->edges.size()}, {"self_loops", loops}};
  });
  stage("reduce", [&] {
    forest = Reduce(*rg, inst, order);
    std::size_t primal = 0;
    for (const auto& t : forest->trees) primal += CheckPrimalConstraints(t).has_value();
    return Json{{"ok", RatioMonotone(*forest, sd->cost, opt->cost)},
                {"components", forest->trees.size()},
                {"passes", forest->passes},
                {"primal_violations", primal}};
  });
  stage("cover", [&] {
    Json costs = Json::array();
    for (const auto& t : forest->trees) {
      coverings.push_back(Construct(t));
      const auto& c = coverings.back();
      costs.push_back(c.exact ? Json(ToString(Cost(t, c.exact_covering)))
                              : Json(Round12(Cost(t, c.real_covering))));
    }
    return Json{{"costs", costs}};
  });
  stage("validate", [&] {
    Json violations = Json::array();
    for (std::size_t i = 0; i < forest->trees.size(); ++i) {
      const auto& t = forest->trees[i];
      const auto& c = coverings[i];
      const auto v = c.exact ? Validate(t, c.exact_covering) : Validate(t, c.real_covering);
      if (v) violations.push_back(Json{{"component", i}, {"violation", v->Describe()}});
    }
    return Json{{"ok", violations.empty()}, {"violations", violations}};
  });
  stage("duality", [&] {
    Json failures = Json::array();
    for (std::size_t i = 0; i < forest->trees.size(); ++i) {
      const auto& t = forest->trees[i];
      const auto& c = coverings[i];
      const DualityReport d = c.exact ? DualityBoundCheck(t, c.exact_covering)
                                      : DualityBoundCheck(t, c.real_covering);
      if (!d.holds) {
        failures.push_back(Json{{"component", i},
                                {"sd_cost", Round12(d.sd_cost)},
                                {"opt_cost", Round12(d.opt_cost)},
                                {"covering_cost", Round12(d.covering_cost)}});
      }
    }
    return Json{{"ok", failures.empty()}, {"failures", failures}};
  });
  return Json{{"ok", ok}, {"g", g}, {"stages", stages}};
}

Ordering ParseOrdering(const std::string& text, std::size_t n) {
  if (text.empty()) return Ordering::Identity(n);
  std::vector<std::size_t> perm;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(part.c_str(), &end, 10);
    if (part.empty() || *end != '\0') {
      throw Error(ErrorCode::kInvalidOrdering, "malformed ordering '" + text + "'");
    }
    perm.push_back(static_cast<std::size_t>(v));
  }
  if (perm.size() != n) {
    throw Error(ErrorCode::kInvalidOrdering,
                "ordering lists " + std::to_string(perm.size()) + " agents, instance has " +
                    std::to_string(n));
  }
  return Ordering(std::move(perm));
}

std::pair<std::int64_t, std::int64_t> ParseRange(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const std::int64_t v = std::stoll(text);
      return {v, v};
    }
    return {std::stoll(text.substr(0, dots)), std::stoll(text.substr(dots + 2))};
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::kInvalidParameter, "malformed range '" + text + "'");
  }
}

int Run(const std::string& command, const Options& opts, std::ostream& out,
        std::ostream& err) {
  try {
    if (command == "gen") return CmdGen(opts, out);
    if (command == "opt") return CmdOpt(opts, out);
    if (command == "sd") return CmdSd(opts, out);
    if (command == "rsd") return CmdRsd(opts, out);
    if (command == "ratio") return CmdRatio(opts, out);
    if (command == "truthful") return CmdTruthful(opts, out);
    if (command == "gtree") return CmdGtree(opts, out);
    if (command == "cover") return CmdCover(opts, out);
    if (command == "verify-cover") return CmdVerifyCover(opts, out);
    if (command == "verify-all") return CmdVerifyAll(opts, out);
    if (command == "sweep") return CmdSweep(opts, out);
    err << "unknown command '" << command << "'\n";
    return kExitBadInput;
  } catch (const Error& e) {
    err << "error: " << Describe(e) << "\n";
    return kExitBadInput;
  }
}

}  // namespace mechlab::cli
