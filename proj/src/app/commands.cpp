#include "coldloop/app/commands.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "coldloop/common.hpp"
#include "coldloop/md/eam.hpp"
#include "coldloop/md/impact.hpp"
#include "coldloop/md/snapshot.hpp"

namespace coldloop::app {

namespace {

double now_seconds() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

std::string utc_stamp(bool compact) {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, compact ? "%Y%m%dT%H%M%SZ" : "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string algorithm_label(const std::string& a) {
  std::string s = a;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  return s;
}

optim::OptimizationTrace run_algorithm(optim::Problem& problem, const RunConfig& config) {
  const std::uint64_t seed = optim::derive_seed(config.seed, 1);
  if (config.algorithm == "ego") {
    optim::EgoOptions o = config.ego;
    o.workers = config.workers;
    return optim::run_ego(problem, o, seed);
  }
  if (config.algorithm == "pso") return optim::run_pso(problem, config.pso, seed);
  if (config.algorithm == "de") return optim::run_de(problem, config.de, seed);
  throw Error("unknown algorithm '" + config.algorithm + "' (expected ego, pso or de)");
}

void write_summary(const RunDir& dir, const std::string& method, const RunConfig& config,
                   const optim::OptimizationTrace& trace, double verified_c) {
  std::ostringstream s;
  fmt::print(s, "[result]\nmethod = {}\nalgorithm = {}\nobjective = {}\n", method, config.algorithm, config.objective);
  fmt::print(s, "best_v = {}\nbest_r = {}\nbest_theta = {}\nbest_c = {}\ncalls = {}\n", trace.best_x[0],
             trace.best_x[1], trace.best_x[2], trace.best_f, trace.calls);
  if (verified_c >= 0.0) fmt::print(s, "verified_c = {}\n", verified_c);
  dir.write_text("summary.ini", s.str());
}

std::vector<DesignPoint> lhs_designs(std::size_t n, std::uint64_t seed, const DesignBounds& b) {
  const optim::Vector lo{b.lower.v, b.lower.r, b.lower.theta};
  const optim::Vector hi{b.upper.v, b.upper.r, b.upper.theta};
  std::vector<DesignPoint> out;
  for (const auto& u : optim::latin_hypercube(n, 3, seed)) {
    const auto x = optim::from_unit(u, lo, hi);
    out.push_back({x[0], x[1], x[2]});
  }
  return out;
}

void write_samples(const RunDir& dir, const std::string& name, const std::vector<nn::Sample>& samples) {
  auto out = dir.create(name);
  fmt::print(out, "v,r,theta,c\n");
  for (const auto& s : samples) fmt::print(out, "{},{},{},{}\n", s.x[0], s.x[1], s.x[2], s.y);
}

const md::Snapshot* nearest_frame(const std::vector<md::Snapshot>& frames, double t, double interval) {
  const md::Snapshot* best = nullptr;
  double gap = 0.5 * interval + 1e-9;
  for (const auto& f : frames) {
    const double d = std::abs(f.time - t);
    if (d <= gap) {
      gap = d;
      best = &f;
    }
  }
  return best;
}

}  // namespace

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_ledger(std::ostream& out, const RunLedger& l) {
  fmt::print(out, "[ledger]\nmethod = {}\nmodeling_tp = {}\noptimization_tp = {}\ntotal_tp = {}\n", l.method,
             l.modeling_tp, l.optimization_tp, l.total_tp());
  fmt::print(out, "verification_tp = {}\ntest_tp = {}\n", l.verification_tp, l.test_tp);
}

RunLedger read_ledger_file(const fs::path& path) {
  boost::property_tree::ptree t;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), t);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ParseError(path.string(), static_cast<int>(e.line()), e.message());
  }
  RunLedger l;
  try {
    l.method = t.get<std::string>("ledger.method");
    l.modeling_tp = t.get<double>("ledger.modeling_tp");
    l.optimization_tp = t.get<double>("ledger.optimization_tp");
    l.verification_tp = t.get<double>("ledger.verification_tp", 0.0);
    l.test_tp = t.get<double>("ledger.test_tp", 0.0);
  } catch (const boost::property_tree::ptree_error& e) {
    throw Error(path.string() + ": " + e.what());
  }
  return l;
}

RunDir::RunDir(const fs::path& out, const std::string& command, const RunConfig& config) {
  fs::create_directories(out);
  const std::string base =
      fmt::format("{}-{:012x}-{}", command, fnv1a(command + "\n" + config_to_string(config, false)) >> 16,
                  utc_stamp(true));
  path_ = out / base;
  for (int k = 2; !fs::create_directory(path_); ++k) path_ = out / fmt::format("{}-{}", base, k);
  log_ = std::make_unique<std::ofstream>(path_ / "run.log");
  phase_start_ = now_seconds();
  log(fmt::format("{} started", command));
  write_text("config.ini", config_to_string(config, true));
}

RunDir::~RunDir() {
  if (log_) *log_ << std::flush;
}

std::ofstream RunDir::create(const std::string& relative) const {
  const fs::path p = path_ / relative;
  if (fs::exists(p)) throw Error("refusing to overwrite " + p.string());
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot create " + p.string());
  return out;
}

void RunDir::write_text(const std::string& relative, const std::string& text) const {
  auto out = create(relative);
  out << text;
  if (!out) throw Error("cannot write " + (path_ / relative).string());
}

void RunDir::write_png(const std::string& relative, const imaging::RasterImage& image) const {
  create(relative).close();
  imaging::write_png((path_ / relative).string(), image);
}

void RunDir::log(const std::string& message) {
  fmt::print(*log_, "[{}] {}\n", utc_stamp(false), message);
  log_->flush();
}

void RunDir::phase_done(const std::string& phase) {
  const double t = now_seconds();
  log(fmt::format("phase {} wall_clock_s = {:.3f}", phase, t - phase_start_));
  phase_start_ = t;
}

std::shared_ptr<const md::EAMPotential> load_potential(const RunConfig& config) {
  if (config.potential.empty()) return std::make_shared<const md::EAMPotential>(md::analytic_copper_potential());
  return std::make_shared<const md::EAMPotential>(md::load_eam_file(config.potential));
}

std::unique_ptr<DesignObjective> make_objective(const RunConfig& config) {
  if (config.objective == "analytic") return std::make_unique<AnalyticObjective>();
  if (config.objective != "simulation") throw Error("unknown objective '" + config.objective + "'");
  SimulationObjectiveConfig sc;
  sc.impact = config.impact;
  sc.render = config.render;
  sc.pipeline = config.pipeline;
  sc.penalty = config.penalty;
  sc.replicas = config.replicas;
  return std::make_unique<SimulationObjective>(sc, load_potential(config));
}

SimulateResult cmd_simulate(const CommandOptions& options) {
  const RunConfig& cfg = options.config;
  const DesignPoint d = clamp_or_reject(cfg.design, BoundPolicy::Reject);
  RunDir dir(options.out, "simulate", cfg);
  SimulateResult res;
  res.run_dir = dir.path();
  const auto potential = load_potential(cfg);
  md::ImpactConfig ic = cfg.impact;
  ic.scene.seed = cfg.seed;
  ic.record_stress = true;
  dir.log(fmt::format("design v={} r={} theta={} seed={}", d.v, d.r, d.theta, cfg.seed));
  const md::ImpactRun run = md::run_impact(d, ic, *potential);
  dir.phase_done("simulation");

  dir.write_text("design.ini", fmt::format("[design]\nv = {}\nr = {}\ntheta = {}\nseed = {}\n\n[run]\nframes = {}\n"
                                           "t_end = {}\ncontact_time = {}\nsteps = {}\ninitial_energy = {}\n"
                                           "final_energy = {}\n",
                                           d.v, d.r, d.theta, cfg.seed, run.frames.size(), run.t_end,
                                           run.contact_time, run.steps, run.initial_energy, run.final_energy));
  for (std::size_t k = 0; k < run.frames.size(); ++k) {
    auto out = dir.create(fmt::format("dumps/frame_{:04d}.dump", k));
    md::write_dump(out, run.frames[k]);
  }
  res.frames = run.frames.size();

  for (double t : cfg.frame_times) {
    const auto* f = nearest_frame(run.frames, t, cfg.impact.snapshot_interval);
    if (!f) {
      dir.log(fmt::format("no frame near t={} ps, top view skipped", t));
      continue;
    }
    const auto img = imaging::render_band(*f, cfg.render, imaging::GroupFilter::all(), 0.0, f->box[2]);
    dir.write_png(fmt::format("topview_t{}.png", t), img);
    res.topview_times.push_back(t);
  }
  for (double t : cfg.stress_times) {
    const auto* f = nearest_frame(run.frames, t, cfg.impact.snapshot_interval);
    if (!f) {
      dir.log(fmt::format("no frame near t={} ps, stress image skipped", t));
      continue;
    }
    const auto img = imaging::render_stress(*f, cfg.render, cfg.stress_min, cfg.stress_max);
    dir.write_png(fmt::format("stress_t{}.png", t), img);
    res.stress_times.push_back(t);
  }
  dir.phase_done("output");
  return res;
}

MeasureResult cmd_measure(const CommandOptions& options, const fs::path& dumps) {
  const RunConfig& cfg = options.config;
  if (!fs::is_directory(dumps)) throw Error("dump directory not found: " + dumps.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dumps))
    if (e.is_regular_file() && e.path().extension() == ".dump") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<md::Snapshot> frames;
  for (const auto& f : files) frames.push_back(md::read_dump_file(f.string()));
  std::stable_sort(frames.begin(), frames.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
  if (frames.empty() || !std::any_of(frames.begin(), frames.end(), [](const auto& f) { return f.pre_impact; }))
    throw Error("no pre-impact (t = 0) frame in " + dumps.string());

  RunDir dir(options.out, "measure", cfg);
  dir.log(fmt::format("{} frames from {}", frames.size(), dumps.string()));
  imaging::AuditSink sink;
  if (options.audit) {
    sink = [&dir](double t, std::string_view stage, const imaging::RasterImage& img) {
      dir.write_png(fmt::format("audit/{}_{}.png", t, stage), img);
    };
  }
  MeasureResult res;
  res.run_dir = dir.path();
  res.measurement = imaging::measure_flattening(frames, cfg.render, cfg.pipeline, sink);
  const auto& m = res.measurement;
  const bool penalized = m.S_m <= 0.0;
  res.c = penalized ? cfg.penalty : m.S_i / m.S_m;
  {
    auto out = dir.create("measurement.csv");
    fmt::print(out, "time,area,centroid_x,centroid_y\n");
    for (const auto& f : m.frames)
      fmt::print(out, "{},{},{},{}\n", f.time, f.splat.area, f.splat.centroid_x, f.splat.centroid_y);
  }
  dir.write_text("summary.ini", fmt::format("[measurement]\nS_i = {}\nS_m = {}\nmu = {}\nc = {}\nframe_of_max = {}\n"
                                            "frames = {}\npenalized = {}\n",
                                            m.S_i, m.S_m, m.mu, res.c, m.frame_of_max, m.frames.size(),
                                            penalized ? "true" : "false"));
  dir.phase_done("measurement");
  return res;
}

OptimizeResult cmd_optimize(const CommandOptions& options) {
  const RunConfig& cfg = options.config;
  auto objective = make_objective(cfg);
  RunDir dir(options.out, "optimize", cfg);
  dir.log(fmt::format("{} on the {} objective, seed {}, {} workers", cfg.algorithm, cfg.objective, cfg.seed,
                      cfg.workers));
  DesignProblem problem(*objective, cfg.seed, cfg.workers);
  OptimizeResult res;
  res.run_dir = dir.path();
  res.trace = run_algorithm(problem, cfg);
  dir.phase_done("optimization");
  res.ledger.method = algorithm_label(cfg.algorithm);
  res.ledger.optimization_tp = res.trace.cum_tp;
  {
    auto out = dir.create("trace.csv");
    optim::write_trace_csv(out, res.trace);
  }
  {
    auto out = dir.create("evaluations.csv");
    write_ledger_csv(out, objective->ledger());
  }
  write_summary(dir, res.ledger.method, cfg, res.trace, -1.0);
  std::ostringstream l;
  write_ledger(l, res.ledger);
  dir.write_text("ledger.ini", l.str());
  return res;
}

TrainSurrogateResult cmd_train_surrogate(const CommandOptions& options) {
  const RunConfig& cfg = options.config;
  auto objective = make_objective(cfg);
  RunDir dir(options.out, "train-surrogate", cfg);
  const auto& bounds = objective->bounds();
  const auto train_designs = lhs_designs(cfg.train_samples, optim::derive_seed(cfg.seed, 2), bounds);
  const auto test_designs = lhs_designs(cfg.test_samples, optim::derive_seed(cfg.seed, 3), bounds);

  auto simulate = [&](const std::vector<DesignPoint>& designs) {
    const auto values = objective->evaluate_batch(designs, cfg.seed, cfg.workers);
    std::vector<nn::Sample> out;
    for (std::size_t i = 0; i < designs.size(); ++i)
      out.push_back({optim::Vector{designs[i].v, designs[i].r, designs[i].theta}, values[i].c});
    return out;
  };
  const auto train_samples = simulate(train_designs);
  dir.phase_done("training samples");
  const auto test_samples = simulate(test_designs);
  dir.phase_done("test samples");

  TrainSurrogateResult res;
  res.run_dir = dir.path();
  auto trained = nn::train(train_samples, cfg.train, optim::derive_seed(cfg.seed, 4));
  dir.phase_done("training");
  res.report = trained.report;
  res.train_regression = nn::evaluate_regression(trained.network, train_samples);
  res.test_regression = nn::evaluate_regression(trained.network, test_samples);

  {
    auto out = dir.create("network.json");
    trained.network.save(out);
  }
  {
    auto out = dir.create("train_report.csv");
    nn::write_train_report_csv(out, res.report);
  }
  write_samples(dir, "train_samples.csv", train_samples);
  write_samples(dir, "test_samples.csv", test_samples);
  dir.write_text("regression.ini",
                 fmt::format("[regression]\ntrain_R = {}\ntrain_mse = {}\ntest_R = {}\ntest_mse = {}\n"
                             "best_epoch = {}\nbest_validation_mse = {}\ntrain_count = {}\nvalidation_count = {}\n",
                             res.train_regression.R, res.train_regression.mse, res.test_regression.R,
                             res.test_regression.mse, res.report.best_epoch, res.report.best_mse,
                             res.report.train_count, res.report.validation_count));
  {
    auto out = dir.create("evaluations.csv");
    write_ledger_csv(out, objective->ledger());
  }
  res.ledger.method = "BPNN";
  res.ledger.modeling_tp = static_cast<double>(train_designs.size()) * objective->cost_per_eval();
  res.ledger.test_tp = static_cast<double>(test_designs.size()) * objective->cost_per_eval();
  std::ostringstream l;
  write_ledger(l, res.ledger);
  dir.write_text("ledger.ini", l.str());
  return res;
}

OptimizeResult cmd_surrogate_optimize(const CommandOptions& options, const fs::path& network) {
  const RunConfig& cfg = options.config;
  auto net = std::make_shared<const nn::MLPNetwork>(nn::MLPNetwork::load_file(network.string()));
  if (net->layers() != cfg.train.layers) {
    auto join = [](const std::vector<std::size_t>& v) { return fmt::format("{}", fmt::join(v, ", ")); };
    throw Error(fmt::format("network {} has layers [{}] but the config expects [{}]", network.string(),
                            join(net->layers()), join(cfg.train.layers)));
  }
  const fs::path training_ledger = network.parent_path() / "ledger.ini";
  const double modeling_tp = fs::exists(training_ledger) ? read_ledger_file(training_ledger).modeling_tp : 0.0;

  auto objective = nn::as_objective(net);
  RunDir dir(options.out, "surrogate-optimize", cfg);
  dir.log(fmt::format("{} on network {}", cfg.algorithm, network.string()));
  if (!fs::exists(training_ledger)) dir.log("no training ledger beside the network; modeling t_p recorded as 0");
  DesignProblem problem(*objective, cfg.seed, cfg.workers);
  OptimizeResult res;
  res.run_dir = dir.path();
  res.trace = run_algorithm(problem, cfg);
  dir.phase_done("optimization");
  res.ledger.method = "BPNN-" + algorithm_label(cfg.algorithm);
  res.ledger.modeling_tp = modeling_tp;
  res.ledger.optimization_tp = res.trace.cum_tp;

  if (cfg.verify) {
    auto truth = make_objective(cfg);
    const DesignPoint best{res.trace.best_x[0], res.trace.best_x[1], res.trace.best_x[2]};
    res.verified_c = truth->evaluate(best, cfg.seed).c;
    res.ledger.verification_tp = truth->cost();
    dir.log(fmt::format("verification simulation c = {}", res.verified_c));
    dir.phase_done("verification");
  }
  {
    auto out = dir.create("trace.csv");
    optim::write_trace_csv(out, res.trace);
  }
  write_summary(dir, res.ledger.method, cfg, res.trace, res.verified_c);
  std::ostringstream l;
  write_ledger(l, res.ledger);
  dir.write_text("ledger.ini", l.str());
  return res;
}

std::string cmd_report(const CommandOptions& options, const std::vector<fs::path>& runs, fs::path* run_dir) {
  struct Row {
    std::string run;
    RunLedger ledger;
    bool has_result = false;
    double v = 0, r = 0, theta = 0, c = 0, verified = -1;
  };
  std::vector<Row> rows;
  for (const auto& p : runs) {
    Row row;
    row.run = p.filename().string();
    row.ledger = read_ledger_file(p / "ledger.ini");
    const fs::path summary = p / "summary.ini";
    if (fs::exists(summary)) {
      boost::property_tree::ptree t;
      boost::property_tree::ini_parser::read_ini(summary.string(), t);
      row.has_result = true;
      row.v = t.get<double>("result.best_v");
      row.r = t.get<double>("result.best_r");
      row.theta = t.get<double>("result.best_theta");
      row.c = t.get<double>("result.best_c");
      row.verified = t.get<double>("result.verified_c", -1.0);
    }
    rows.push_back(row);
  }

  std::ostringstream csv, md;
  fmt::print(csv, "method,run,modeling_tp,optimization_tp,total_tp,verification_tp,best_v,best_r,best_theta,best_c,"
                  "verified_c\n");
  for (const auto& r : rows) {
    fmt::print(csv, "{},{},{},{},{},{},", r.ledger.method, r.run, r.ledger.modeling_tp, r.ledger.optimization_tp,
               r.ledger.total_tp(), r.ledger.verification_tp);
    if (r.has_result)
      fmt::print(csv, "{},{},{},{},{}\n", r.v, r.r, r.theta, r.c, r.verified >= 0 ? fmt::format("{}", r.verified) : "");
    else
      fmt::print(csv, ",,,,\n");
  }

  auto tp = [](double x) { return x > 0 ? fmt::format("{:g} t_p", x) : std::string("-"); };
  fmt::print(md, "## Computational cost\n\n| Method | Modeling cost | Optimization cost | Total cost | Verification |\n"
                 "|---|---|---|---|---|\n");
  for (const auto& r : rows)
    fmt::print(md, "| {} | {} | {} | {} | {} |\n", r.ledger.method, tp(r.ledger.modeling_tp),
               tp(r.ledger.optimization_tp), tp(r.ledger.total_tp()), tp(r.ledger.verification_tp));
  fmt::print(md, "\n## Optimal solutions\n\n| Method | v (A/ps) | r (A) | theta (deg) | c | verified c |\n"
                 "|---|---|---|---|---|---|\n");
  for (const auto& r : rows) {
    if (!r.has_result) continue;
    fmt::print(md, "| {} | {:.4f} | {:.4f} | {:.4f} | {:.6f} | {} |\n", r.ledger.method, r.v, r.r, r.theta, r.c,
               r.verified >= 0 ? fmt::format("{:.6f}", r.verified) : "-");
  }

  RunDir dir(options.out, "report", options.config);
  for (const auto& p : runs) dir.log("run " + p.string());
  dir.write_text("report.csv", csv.str());
  dir.write_text("report.md", md.str());
  if (run_dir) *run_dir = dir.path();
  return md.str();
}

void cmd_gen_potential(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot create " + path.string());
  md::write_setfl(out, md::analytic_copper_potential());
}

}  // namespace coldloop::app
