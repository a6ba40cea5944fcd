#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "coldloop/app/config.hpp"
#include "coldloop/objective.hpp"

namespace coldloop::app {

namespace fs = std::filesystem;

/// Per-phase t_p of one run. total = modeling + optimization; a surrogate verification
/// simulation is charged separately in verification_tp.
struct RunLedger {
  std::string method;
  double modeling_tp = 0.0;
  double optimization_tp = 0.0;
  double verification_tp = 0.0;
  double test_tp = 0.0;  // surrogate test simulations, reported but outside the modeling t_p
  double total_tp() const { return modeling_tp + optimization_tp; }
};

void write_ledger(std::ostream& out, const RunLedger& ledger);
RunLedger read_ledger_file(const fs::path& path);

/// One write-once output directory: `<out>/<command>-<config hash>-<UTC timestamp>[-k]`.
/// Creating a file that already exists throws. Timestamps and wall-clock times go to
/// run.log only.
class RunDir {
 public:
  RunDir(const fs::path& out, const std::string& command, const RunConfig& config);
  ~RunDir();
  const fs::path& path() const { return path_; }

  /// Fails if the file exists. Subdirectories are created as needed.
  std::ofstream create(const std::string& relative) const;
  void write_text(const std::string& relative, const std::string& text) const;
  void write_png(const std::string& relative, const imaging::RasterImage& image) const;
  void log(const std::string& message);
  /// Seconds since the previous phase mark (or construction), logged under `phase`.
  void phase_done(const std::string& phase);

 private:
  fs::path path_;
  std::unique_ptr<std::ofstream> log_;
  double phase_start_;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text);

struct CommandOptions {
  RunConfig config{};
  fs::path out = "runs";
  bool audit = false;
};

/// The built-in Cu table unless config.potential names a file.
std::shared_ptr<const md::EAMPotential> load_potential(const RunConfig& config);

/// Simulation or analytic objective per config.objective.
std::unique_ptr<DesignObjective> make_objective(const RunConfig& config);

struct SimulateResult {
  fs::path run_dir;
  std::size_t frames = 0;
  std::vector<double> topview_times, stress_times;  // frames actually rendered
};
/// One impact at config.design: dumps/frame_<k>.dump for every frame, topview_t<t>.png
/// at frame_times and stress_t<t>.png at stress_times (nearest frame within half a cadence).
SimulateResult cmd_simulate(const CommandOptions& options);

struct MeasureResult {
  fs::path run_dir;
  imaging::MeasurementResult measurement;
  double c = 0.0;
};
/// Imaging pipeline over every *.dump in `dumps`. measurement.csv has one row per
/// post-contact frame; summary.ini holds S_i, S_m, mu, c. With audit, audit/<t>_<stage>.png.
/// Throws Error when no pre-impact (t = 0) frame exists.
MeasureResult cmd_measure(const CommandOptions& options, const fs::path& dumps);

struct OptimizeResult {
  fs::path run_dir;
  optim::OptimizationTrace trace;
  RunLedger ledger;
  double verified_c = -1.0;  // surrogate runs with verify only
};
/// Classic loop: config.algorithm against the true objective. trace.csv, summary.ini,
/// evaluations.csv, ledger.ini.
OptimizeResult cmd_optimize(const CommandOptions& options);

struct TrainSurrogateResult {
  fs::path run_dir;
  nn::TrainReport report;
  nn::Regression train_regression, test_regression;
  RunLedger ledger;
};
/// Surrogate training loop: Latin hypercube training and test designs simulated, network
/// trained and evaluated. network.json, train_report.csv, train_samples.csv,
/// test_samples.csv, regression.ini, ledger.ini.
TrainSurrogateResult cmd_train_surrogate(const CommandOptions& options);

/// Surrogate-assisted loop: config.algorithm against the network at `network`. The
/// modeling t_p comes from ledger.ini beside the network file. Throws Error when the
/// network's layer sizes differ from config.train.layers.
OptimizeResult cmd_surrogate_optimize(const CommandOptions& options, const fs::path& network);

/// Cost and optimum tables over run directories: report.csv and report.md in a new run
/// directory. Returns the markdown.
std::string cmd_report(const CommandOptions& options, const std::vector<fs::path>& runs, fs::path* run_dir = nullptr);

/// The built-in Cu table as a setfl file.
void cmd_gen_potential(const fs::path& path);

}  // namespace coldloop::app
