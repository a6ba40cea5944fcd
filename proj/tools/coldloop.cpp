#include <fmt/format.h>

#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "coldloop/app/commands.hpp"
#include "coldloop/common.hpp"

using namespace coldloop;
using namespace coldloop::app;

int main(int argc, char** argv) {
  CLI::App app{"Cold-spray impact simulation, splat imaging and design optimization"};
  app.require_subcommand(1);

  std::string config_path, out = "runs";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  bool audit = false;
  app.add_option("--config", config_path, "INI configuration file (defaults apply to absent keys)")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "overrides [run] seed");
  app.add_option("--out", out, "parent directory of run directories")->capture_default_str();
  app.add_flag("--audit", audit, "measure: write every pipeline stage image");
  app.add_option("--workers", workers, "concurrent simulations; overrides [run] workers");

  auto* simulate = app.add_subcommand("simulate", "one impact: dumps, top views and stress images");
  std::optional<double> v, r, theta;
  simulate->add_option("--v", v, "impact speed, A/ps");
  simulate->add_option("--r", r, "particle radius, A");
  simulate->add_option("--theta", theta, "impact angle, degrees");

  auto* measure = app.add_subcommand("measure", "flattening measurement over a dump directory");
  std::string dumps;
  measure->add_option("--dumps", dumps, "directory of *.dump frames")->required()->check(CLI::ExistingDirectory);

  auto* optimize = app.add_subcommand("optimize", "classic loop against the true objective");
  std::optional<std::string> algorithm, objective;
  optimize->add_option("--algorithm", algorithm, "ego, pso or de");
  optimize->add_option("--objective", objective, "simulation or analytic");

  auto* train = app.add_subcommand("train-surrogate", "simulate training/test designs and train the network");
  train->add_option("--objective", objective, "simulation or analytic");

  auto* sopt = app.add_subcommand("surrogate-optimize", "optimize against a trained network");
  std::string network;
  bool verify = false;
  sopt->add_option("--network", network, "network.json from train-surrogate")->required()->check(CLI::ExistingFile);
  sopt->add_option("--algorithm", algorithm, "ego, pso or de");
  sopt->add_option("--objective", objective, "objective used for --verify");
  sopt->add_flag("--verify", verify, "re-simulate the optimum once (+1 t_p)");

  auto* report = app.add_subcommand("report", "cost and optimum tables over run directories");
  std::vector<std::string> runs;
  report->add_option("runs", runs, "run directories")->required()->check(CLI::ExistingDirectory);

  auto* gen = app.add_subcommand("gen-potential", "write the built-in Cu EAM table as a setfl file");
  std::string potential_out = "Cu_analytic.eam.alloy";
  gen->add_option("path", potential_out, "output file")->capture_default_str();

  auto* show = app.add_subcommand("config", "print the documented configuration");
  bool full_scale = false;
  show->add_flag("--full-scale", full_scale, "large-substrate defaults");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = full_scale ? RunConfig::full_scale() : RunConfig{};
    if (!config_path.empty()) cfg = load_config_file(config_path);
    if (seed) cfg.seed = *seed;
    if (workers) cfg.workers = *workers;
    if (algorithm) cfg.algorithm = *algorithm;
    if (objective) cfg.objective = *objective;
    if (v) cfg.design.v = *v;
    if (r) cfg.design.r = *r;
    if (theta) cfg.design.theta = *theta;
    if (verify) cfg.verify = true;
    if (cfg.algorithm != "ego" && cfg.algorithm != "pso" && cfg.algorithm != "de")
      throw Error("unknown algorithm '" + cfg.algorithm + "' (expected ego, pso or de)");

    CommandOptions opts{cfg, out, audit};
    if (*simulate) {
      const auto res = cmd_simulate(opts);
      fmt::print("{}\n{} frames\n", res.run_dir.string(), res.frames);
    } else if (*measure) {
      const auto res = cmd_measure(opts, dumps);
      fmt::print("{}\nS_i {} S_m {} mu {:.6f} c {:.6f}\n", res.run_dir.string(), res.measurement.S_i,
                 res.measurement.S_m, res.measurement.mu, res.c);
    } else if (*optimize || *sopt) {
      const auto res = *optimize ? cmd_optimize(opts) : cmd_surrogate_optimize(opts, network);
      const auto& x = res.trace.best_x;
      fmt::print("{}\n{} best v {:.4f} r {:.4f} theta {:.4f} c {:.6f} ({:g} t_p total)\n", res.run_dir.string(),
                 res.ledger.method, x[0], x[1], x[2], res.trace.best_f, res.ledger.total_tp());
      if (res.verified_c >= 0.0) fmt::print("verified c {:.6f}\n", res.verified_c);
    } else if (*train) {
      const auto res = cmd_train_surrogate(opts);
      fmt::print("{}\ntrain R {:.4f} test R {:.4f} test MSE {:.6g} ({:g} t_p modeling)\n", res.run_dir.string(),
                 res.train_regression.R, res.test_regression.R, res.test_regression.mse, res.ledger.modeling_tp);
    } else if (*report) {
      fs::path dir;
      std::vector<fs::path> paths(runs.begin(), runs.end());
      const auto md = cmd_report(opts, paths, &dir);
      fmt::print("{}\n\n{}", dir.string(), md);
    } else if (*gen) {
      cmd_gen_potential(potential_out);
      fmt::print("{}\n", potential_out);
    } else if (*show) {
      std::cout << config_to_string(cfg, true);
    }
  } catch (const ParseError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
