// wopt <task> --config <path> [--out <dir>] [--seed <u64>] [--grid <n>]
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wopt/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Eigenvalue optimisation of sign-changing weights on grid domains"};
  app.option_defaults()->always_capture_default();

  std::string task;
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  int grid = 0;
  bool broken_tie_rule = false;

  const std::vector<std::string> tasks(std::begin(wopt::cli::kTasks),
                                       std::end(wopt::cli::kTasks));
  app.add_option("task", task, "eig | optimize | optimize2 | symmetrize | verify | remark")
      ->required()
      ->check(CLI::IsMember(tasks));
  app.add_option("--config", config, "JSON run configuration")->required();
  auto* out_opt = app.add_option("--out", out, "output directory (overrides output.dir)");
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides rng_seed)");
  auto* grid_opt = app.add_option("--grid", grid, "cells across; keeps the physical extent")
                       ->check(CLI::Range(3, 1 << 14));
  // Test hook: the set symmetrisation breaks parity ties the other way, which
  // the superlevel-consistency suite has to catch.
  app.add_flag("--inject-broken-tie-rule", broken_tie_rule)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return wopt::cli::kMalformedConfig;
  }

  wopt::cli::Overrides o;
  if (*out_opt) o.out = out;
  if (*seed_opt) o.seed = seed;
  if (*grid_opt) o.grid = grid;
  o.inject_broken_tie_rule = broken_tie_rule;
  return wopt::cli::run_command(task, config, o, std::cerr);
}
