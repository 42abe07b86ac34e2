// SPDX-License-Identifier: Apache-2.0

#ifndef MECHLAB_CLI_H_
#define MECHLAB_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mechlab/instance.h"
#include "mechlab/io.h"
#include "mechlab/mechanisms.h"

namespace mechlab::cli {

struct Options {
  std::string in;
  std::string out;
  std::string csv;
  std::uint64_t seed = 1;
  std::int64_t g = 1;

  // gen / sweep
  std::string family = "sd-lb";
  std::int64_t k = 1;
  std::int64_t n = 2;
  double eps = 1e-6;
  double delta = 1e-6;

  // sd / gtree / truthful / verify-all; empty means instance order
  std::string order;

  // rsd / ratio / sweep
  bool exact = false;
  std::uint64_t samples = 0;
  std::string mech;

  // cover / verify-cover
  std::string tree;
  std::string cover;
  std::size_t component = 0;
  bool g_given = false;

  // sweep, inclusive "a..b" or a single value
  std::string g_range = "1";
  std::string k_range = "1";
};

// Upper bound on the SD ratio under augmentation g with n agents:
// 2^n - 1, log2(n + 1) or g / (g - 2).
double SdRatioBound(std::int64_t g, std::int64_t n);

struct ReportRow {
  std::string family;
  std::int64_t g = 1;
  std::optional<std::int64_t> k;
  std::int64_t n = 0;
  bool skipped = false;
  double sc_mech = 0.0;
  double sc_opt = 0.0;
  double ratio = 0.0;
  std::optional<double> bound;  // upper bound on the ratio, if known
  std::optional<double> slack;  // bound - ratio
};

// One row per (g, k) in (g, k) order; rows run concurrently. Rows whose
// exhaustive enumeration exceeds the guard are marked skipped.
std::vector<ReportRow> Sweep(const std::string& family, std::int64_t g_lo,
                             std::int64_t g_hi, std::int64_t k_lo, std::int64_t k_hi,
                             double eps, double delta, std::int64_t n,
                             const std::string& mech);

inline constexpr const char* kSweepHeader =
    "family,g,k,n,sc_mech,sc_opt,ratio,bound,slack";
std::string FormatCsvRow(const ReportRow& r);

// End-to-end pipeline: sd, optimal, rep-graph, reduce, cover, validate,
// duality. Reports "ok" per stage and overall.
Json VerifyAll(const Instance& inst, std::int64_t g, const Ordering& order);

// Parses "0,2,1"; empty text gives the identity on n agents.
Ordering ParseOrdering(const std::string& text, std::size_t n);

// "a..b" or "a".
std::pair<std::int64_t, std::int64_t> ParseRange(const std::string& text);

// Runs a subcommand; JSON goes to `out` (or the --out file), diagnostics to
// `err`. Returns the process exit code.
int Run(const std::string& command, const Options& opts, std::ostream& out,
        std::ostream& err);

}  // namespace mechlab::cli

#endif  // MECHLAB_CLI_H_
