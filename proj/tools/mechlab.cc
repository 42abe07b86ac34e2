// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "CLI11.hpp"
#include "mechlab/cli.h"

int main(int argc, char** argv) {
  mechlab::cli::Options o;
  CLI::App app{"Facility assignment mechanisms under capacity augmentation"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--in", o.in, "Instance JSON");
  app.add_option("--out", o.out, "Write output here instead of stdout");
  app.add_option("--csv", o.csv, "Append a summary row to this CSV file");
  app.add_option("--seed", o.seed, "Sampling seed");
  auto* g_opt = app.add_option("--g", o.g, "Capacity augmentation factor")
                    ->check(CLI::PositiveNumber);

  auto* gen = app.add_subcommand("gen", "Generate a lower-bound family instance");
  gen->add_option("--family", o.family, "sd-lb | rsd-lb | two-sd | two-anon")
      ->check(CLI::IsMember({"sd-lb", "rsd-lb", "two-sd", "two-anon"}));
  gen->add_option("--k", o.k, "Number of levels");
  gen->add_option("--n", o.n, "Agents (two-anon)");
  gen->add_option("--eps", o.eps, "Perturbation");
  gen->add_option("--delta", o.delta, "Facility offset (two-sd)");

  app.add_subcommand("opt", "Optimal assignment");
  auto* sd = app.add_subcommand("sd", "Serial dictatorship with augmentation g");
  sd->add_option("--order", o.order, "Comma-separated agent order");

  auto* rsd = app.add_subcommand("rsd", "Random serial dictatorship");
  rsd->add_flag("--exact", o.exact, "Enumerate all orderings");
  rsd->add_option("--samples", o.samples, "Monte Carlo sample count");

  auto* ratio = app.add_subcommand("ratio", "Approximation ratio report");
  ratio->add_option("--mech", o.mech, "sd | rsd")->check(CLI::IsMember({"sd", "rsd"}));
  ratio->add_option("--order", o.order, "Comma-separated agent order (sd)");

  auto* truthful = app.add_subcommand("truthful", "Search single-agent misreports of SD");
  truthful->add_option("--order", o.order, "Comma-separated agent order");

  auto* gtree = app.add_subcommand("gtree", "Reduce (O, S) to g-tree components");
  gtree->add_option("--order", o.order, "Comma-separated agent order");

  auto* cover = app.add_subcommand("cover", "Construct a path covering for a tree");
  cover->add_option("--tree", o.tree, "Tree or forest JSON")->required();
  cover->add_option("--component", o.component, "Forest component index");

  auto* vcover = app.add_subcommand("verify-cover", "Validate a path covering");
  vcover->add_option("--tree", o.tree, "Tree or forest JSON")->required();
  vcover->add_option("--cover", o.cover, "Covering JSON")->required();
  vcover->add_option("--component", o.component, "Forest component index");

  auto* vall = app.add_subcommand("verify-all", "Run the full pipeline on an instance");
  vall->add_option("--order", o.order, "Comma-separated agent order");

  auto* sweep = app.add_subcommand("sweep", "Ratio table over a family, as CSV");
  sweep->add_option("--family", o.family, "sd-lb | rsd-lb | two-sd | two-anon")
      ->check(CLI::IsMember({"sd-lb", "rsd-lb", "two-sd", "two-anon"}));
  sweep->add_option("--g-range", o.g_range, "g values, a..b");
  sweep->add_option("--k-range", o.k_range, "k values, a..b");
  sweep->add_option("--mech", o.mech, "sd | rsd")->check(CLI::IsMember({"sd", "rsd"}));
  sweep->add_option("--n", o.n, "Agents (two-anon)");
  sweep->add_option("--eps", o.eps, "Perturbation");
  sweep->add_option("--delta", o.delta, "Facility offset (two-sd)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  o.g_given = g_opt->count() > 0;
  return mechlab::cli::Run(app.get_subcommands().front()->get_name(), o, std::cout,
                           std::cerr);
}
