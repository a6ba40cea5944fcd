#pragma once

#include <atomic>
#include <cstdint>
#include <future>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "coldloop/design.hpp"
#include "coldloop/imaging.hpp"
#include "coldloop/md/eam.hpp"
#include "coldloop/md/impact.hpp"
#include "coldloop/optim/problem.hpp"

namespace coldloop {

enum class Provenance { Simulated, Cached, SurrogatePredicted };
std::string_view provenance_name(Provenance p);

struct ObjectiveValue {
  double c = 0.0;
  imaging::MeasurementResult measurement;
  double eval_cost = 0.0;  // t_p charged by this call
  Provenance provenance = Provenance::Simulated;
  bool penalized = false;  // no splat detected or the simulation failed; c is the penalty
  std::string note;        // reason for a penalty
};

enum class BoundPolicy { Clamp, Reject };

/// Clamp projects each coordinate onto its interval; Reject throws BoundsError.
DesignPoint clamp_or_reject(const DesignPoint& design, BoundPolicy policy, const DesignBounds& bounds = {});

/// One row of the evaluation ledger.
struct LedgerRow {
  std::size_t index = 0;
  DesignPoint design;
  std::uint64_t seed = 0;
  ObjectiveValue value;
};

/// c(v, r, theta) with bounds enforcement, a result cache keyed on (design rounded to
/// 1e-6, seed), a t_p counter and a ledger. Subclasses supply `compute`.
///
/// Thread safety: evaluate may be called concurrently. Concurrent requests for the same
/// key share one computation; the counter counts distinct computations only. Ledger rows
/// are appended by evaluate and, in input order, by evaluate_batch.
class DesignObjective {
 public:
  explicit DesignObjective(DesignBounds bounds = {}, double cost_per_eval = 1.0);
  virtual ~DesignObjective() = default;
  DesignObjective(const DesignObjective&) = delete;
  DesignObjective& operator=(const DesignObjective&) = delete;

  ObjectiveValue evaluate(const DesignPoint& design, std::uint64_t seed);
  std::vector<ObjectiveValue> evaluate_batch(const std::vector<DesignPoint>& designs, std::uint64_t seed,
                                             std::size_t workers);

  /// Number of distinct (design, seed) computations.
  std::size_t evaluations() const { return evaluations_.load(); }
  /// Cumulative t_p: evaluations() * cost_per_eval.
  double cost() const { return static_cast<double>(evaluations()) * cost_per_eval_; }
  double cost_per_eval() const { return cost_per_eval_; }
  const DesignBounds& bounds() const { return bounds_; }
  std::vector<LedgerRow> ledger() const;

 protected:
  /// The expensive part. Must be deterministic per (design, seed) and thread-safe.
  virtual ObjectiveValue compute(const DesignPoint& design, std::uint64_t seed) const = 0;
  virtual Provenance fresh_provenance() const { return Provenance::Simulated; }

 private:
  using Key = std::tuple<std::int64_t, std::int64_t, std::int64_t, std::uint64_t>;
  static Key key_of(const DesignPoint& d, std::uint64_t seed);
  ObjectiveValue lookup_or_compute(const DesignPoint& design, std::uint64_t seed);
  void record(const DesignPoint& design, std::uint64_t seed, const ObjectiveValue& v);

  DesignBounds bounds_;
  double cost_per_eval_;
  std::atomic<std::size_t> evaluations_{0};
  mutable std::mutex mutex_;
  std::map<Key, std::shared_future<ObjectiveValue>> cache_;
  std::vector<LedgerRow> ledger_;
};

struct SimulationObjectiveConfig {
  md::ImpactConfig impact{};
  imaging::RenderRule render{};
  imaging::PipelineParams pipeline{};
  double penalty = 10.0;
  std::size_t replicas = 1;  // > 1 averages c over seeds seed, seed+1, ...
};

/// The closed-loop objective: impact simulation, imaging pipeline, c = S_i / S_m.
class SimulationObjective : public DesignObjective {
 public:
  SimulationObjective(SimulationObjectiveConfig config, std::shared_ptr<const md::EAMPotential> potential,
                      DesignBounds bounds = {});
  const SimulationObjectiveConfig& config() const { return config_; }

  /// Optional per-simulation hook (frames and measurement), e.g. to persist dumps.
  using FrameHook = std::function<void(const DesignPoint&, std::uint64_t, const md::ImpactRun&,
                                       const imaging::MeasurementResult&)>;
  void set_frame_hook(FrameHook hook) { hook_ = std::move(hook); }

 protected:
  ObjectiveValue compute(const DesignPoint& design, std::uint64_t seed) const override;

 private:
  ObjectiveValue single(const DesignPoint& design, std::uint64_t seed) const;
  SimulationObjectiveConfig config_;
  std::shared_ptr<const md::EAMPotential> potential_;
  FrameHook hook_;
};

/// Cheap closed-form stand-in with the qualitative shape of the simulated objective:
/// decreasing in v, a shallow optimum in r, increasing in theta. Charged like a simulation.
double analytic_flattening_cost(const DesignPoint& d);

class AnalyticObjective : public DesignObjective {
 public:
  explicit AnalyticObjective(DesignBounds bounds = {}) : DesignObjective(bounds) {}

 protected:
  ObjectiveValue compute(const DesignPoint& design, std::uint64_t seed) const override;
};

/// Adapter presenting a DesignObjective as an optimizer problem over (v, r, theta)
/// with a fixed seed. Batches run on up to `workers` threads.
class DesignProblem : public optim::Problem {
 public:
  DesignProblem(DesignObjective& objective, std::uint64_t seed, std::size_t workers = 1);
  std::size_t dims() const override { return 3; }
  optim::Vector lower() const override;
  optim::Vector upper() const override;
  double evaluate(const optim::Vector& x) override;
  std::vector<double> evaluate_batch(const std::vector<optim::Vector>& xs) override;
  double cost() const override { return objective_.cost(); }
  double unit_cost() const override { return objective_.cost_per_eval(); }

 private:
  DesignObjective& objective_;
  std::uint64_t seed_;
  std::size_t workers_;
};

/// Measurement CSV: design_v,design_r,design_theta,S_i,S_m,mu,c,frame_of_max
void write_measurement_header(std::ostream& out);
void write_measurement_row(std::ostream& out, const DesignPoint& d, const imaging::MeasurementResult& m, double c);

/// Evaluation ledger CSV, one row per computation.
void write_ledger_csv(std::ostream& out, const std::vector<LedgerRow>& rows);

}  // namespace coldloop
