#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "attrition/config.hpp"
#include "attrition/runner.hpp"

namespace {

struct CliOverrides {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> paths;
  std::optional<double> dt;
  std::size_t dump_paths = 0;
  int workers = 0;
};

void add_common(CLI::App* cmd, CliOverrides& o) {
  cmd->add_option("--config", o.config_path, "experiment config file")
      ->required();
  cmd->add_option("--out", o.out_dir, "output directory (default: out)");
  cmd->add_option("--seed", o.seed, "override config seed");
  cmd->add_option("--paths", o.paths, "override config n_paths");
  cmd->add_option("--dt", o.dt, "override config dt");
  cmd->add_option("--dump-paths", o.dump_paths,
                  "write the first K playout traces to <out>/paths/");
  cmd->add_option("--workers", o.workers,
                  "worker threads (0 = machine parallelism)");
}

int run_with(const CliOverrides& o, std::optional<attrition::RunMode> mode) {
  attrition::ExperimentConfig config;
  try {
    config = attrition::load_config(o.config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 2;
  }
  if (mode) config.mode = *mode;
  if (o.seed) config.seed = *o.seed;
  if (o.paths) config.n_paths = *o.paths;
  if (o.dt) config.dt = *o.dt;

  attrition::RunOptions opts;
  opts.workers = o.workers;
  opts.dump_paths = o.dump_paths;
  return attrition::run_experiment(config, o.out_dir, opts);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Monte Carlo engine for a two-firm market-switching timing game"};
  app.require_subcommand(1);

  CliOverrides o_sim, o_cal, o_det, o_val, o_run;
  auto* sim = app.add_subcommand(
      "simulate", "equilibrium playouts of the stochastic game");
  add_common(sim, o_sim);
  auto* cal = app.add_subcommand(
      "calibrate", "fit the attrition/continuation boundary parameter");
  add_common(cal, o_cal);
  auto* det = app.add_subcommand(
      "deterministic", "zero-volatility timeline and playouts");
  add_common(det, o_det);
  auto* val = app.add_subcommand(
      "value", "constrained stopping value at the start state");
  add_common(val, o_val);
  auto* run =
      app.add_subcommand("run", "run whatever mode the config specifies");
  add_common(run, o_run);

  CLI11_PARSE(app, argc, argv);

  if (sim->parsed()) return run_with(o_sim, attrition::RunMode::Stochastic);
  if (cal->parsed()) return run_with(o_cal, attrition::RunMode::CalibrateOnly);
  if (det->parsed()) return run_with(o_det, attrition::RunMode::Deterministic);
  if (val->parsed()) return run_with(o_val, attrition::RunMode::ValueOnly);
  return run_with(o_run, std::nullopt);
}
