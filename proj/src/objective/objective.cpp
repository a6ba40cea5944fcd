#include "coldloop/objective.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>

#include "coldloop/common.hpp"

namespace coldloop {

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Simulated: return "simulated";
    case Provenance::Cached: return "cached";
    case Provenance::SurrogatePredicted: return "surrogate";
  }
  return "?";
}

DesignPoint clamp_or_reject(const DesignPoint& d, BoundPolicy policy, const DesignBounds& b) {
  if (policy == BoundPolicy::Reject) {
    if (!b.contains(d))
      throw BoundsError(fmt::format("design (v={}, r={}, theta={}) outside [{},{}]x[{},{}]x[{},{}]", d.v, d.r, d.theta,
                                    b.lower.v, b.upper.v, b.lower.r, b.upper.r, b.lower.theta, b.upper.theta));
    return d;
  }
  return {std::clamp(d.v, b.lower.v, b.upper.v), std::clamp(d.r, b.lower.r, b.upper.r),
          std::clamp(d.theta, b.lower.theta, b.upper.theta)};
}

DesignObjective::DesignObjective(DesignBounds bounds, double cost_per_eval)
    : bounds_(bounds), cost_per_eval_(cost_per_eval) {}

DesignObjective::Key DesignObjective::key_of(const DesignPoint& d, std::uint64_t seed) {
  auto q = [](double x) { return static_cast<std::int64_t>(std::llround(x * 1e6)); };
  return {q(d.v), q(d.r), q(d.theta), seed};
}

ObjectiveValue DesignObjective::lookup_or_compute(const DesignPoint& design, std::uint64_t seed) {
  clamp_or_reject(design, BoundPolicy::Reject, bounds_);
  const Key key = key_of(design, seed);
  std::promise<ObjectiveValue> promise;
  {
    std::unique_lock lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
      auto fut = it->second;
      lock.unlock();
      ObjectiveValue v = fut.get();
      v.provenance = Provenance::Cached;
      v.eval_cost = 0.0;
      return v;
    }
    cache_.emplace(key, promise.get_future().share());
  }
  try {
    ObjectiveValue v = compute(design, seed);
    v.provenance = fresh_provenance();
    v.eval_cost = cost_per_eval_;
    evaluations_.fetch_add(1);
    promise.set_value(v);
    return v;
  } catch (...) {
    // Forget the failed key so a later call may retry, and wake any waiters.
    {
      std::lock_guard lock(mutex_);
      cache_.erase(key);
    }
    promise.set_exception(std::current_exception());
    throw;
  }
}

void DesignObjective::record(const DesignPoint& design, std::uint64_t seed, const ObjectiveValue& v) {
  std::lock_guard lock(mutex_);
  ledger_.push_back({ledger_.size() + 1, design, seed, v});
}

ObjectiveValue DesignObjective::evaluate(const DesignPoint& design, std::uint64_t seed) {
  ObjectiveValue v = lookup_or_compute(design, seed);
  if (v.provenance != Provenance::Cached) record(design, seed, v);
  return v;
}

std::vector<ObjectiveValue> DesignObjective::evaluate_batch(const std::vector<DesignPoint>& designs,
                                                            std::uint64_t seed, std::size_t workers) {
  for (const auto& d : designs) clamp_or_reject(d, BoundPolicy::Reject, bounds_);
  // Distinct keys in first-occurrence order; repeats inside the batch reuse the first.
  std::vector<std::size_t> owner(designs.size());
  std::vector<std::size_t> unique;
  std::map<Key, std::size_t> slot;
  for (std::size_t i = 0; i < designs.size(); ++i) {
    auto [it, inserted] = slot.emplace(key_of(designs[i], seed), unique.size());
    if (inserted) unique.push_back(i);
    owner[i] = it->second;
  }
  std::vector<ObjectiveValue> results(unique.size());
  optim::parallel_for(unique.size(), workers,
                      [&](std::size_t u) { results[u] = lookup_or_compute(designs[unique[u]], seed); });
  // Ledger rows in input order regardless of completion order.
  for (std::size_t u = 0; u < unique.size(); ++u)
    if (results[u].provenance != Provenance::Cached) record(designs[unique[u]], seed, results[u]);

  std::vector<ObjectiveValue> out(designs.size());
  for (std::size_t i = 0; i < designs.size(); ++i) {
    out[i] = results[owner[i]];
    if (unique[owner[i]] != i) {
      out[i].provenance = Provenance::Cached;
      out[i].eval_cost = 0.0;
    }
  }
  return out;
}

std::vector<LedgerRow> DesignObjective::ledger() const {
  std::lock_guard lock(mutex_);
  return ledger_;
}

SimulationObjective::SimulationObjective(SimulationObjectiveConfig config,
                                         std::shared_ptr<const md::EAMPotential> potential, DesignBounds bounds)
    : DesignObjective(bounds), config_(std::move(config)), potential_(std::move(potential)) {
  if (!potential_) throw Error("SimulationObjective needs a potential");
  if (config_.replicas == 0) throw Error("replicas must be at least 1");
  if (!(config_.penalty > 0.0)) throw Error("penalty must be positive");
}

ObjectiveValue SimulationObjective::single(const DesignPoint& design, std::uint64_t seed) const {
  md::ImpactConfig ic = config_.impact;
  ic.scene.seed = seed;
  ObjectiveValue v;
  try {
    const auto run = md::run_impact(design, ic, *potential_);
    v.measurement = imaging::measure_flattening(run.frames, config_.render, config_.pipeline);
    if (hook_) hook_(design, seed, run, v.measurement);
  } catch (const NumericalError& e) {
    v.c = config_.penalty;
    v.penalized = true;
    v.note = std::string("simulation failed: ") + e.what();
    return v;
  }
  if (v.measurement.S_m <= 0.0) {
    v.c = config_.penalty;
    v.penalized = true;
    v.note = "no splat detected";
    return v;
  }
  v.c = v.measurement.S_i / v.measurement.S_m;
  return v;
}

ObjectiveValue SimulationObjective::compute(const DesignPoint& design, std::uint64_t seed) const {
  if (config_.replicas == 1) return single(design, seed);
  ObjectiveValue acc;
  double si = 0.0, sm = 0.0;
  for (std::size_t k = 0; k < config_.replicas; ++k) {
    const auto v = single(design, seed + k);
    acc.c += v.c / static_cast<double>(config_.replicas);
    acc.penalized = acc.penalized || v.penalized;
    if (!v.note.empty()) acc.note = v.note;
    si += v.measurement.S_i;
    sm += v.measurement.S_m;
    if (k == 0) acc.measurement.frame_of_max = v.measurement.frame_of_max;
  }
  const double n = static_cast<double>(config_.replicas);
  acc.measurement.S_i = si / n;
  acc.measurement.S_m = sm / n;
  acc.measurement.mu = acc.measurement.S_m / acc.measurement.S_i;
  return acc;
}

double analytic_flattening_cost(const DesignPoint& d) {
  const double speed = 0.55 * std::exp(-(d.v - 3.0) / 3.5);
  const double size = 0.0015 * (d.r - 14.7) * (d.r - 14.7) + 0.01 * std::sin(0.9 * d.r) * std::exp(-(d.v - 3.0) / 6.0);
  const double angle = 2.5e-4 * d.theta * d.theta;
  return 0.17 + speed + size + angle;
}

ObjectiveValue AnalyticObjective::compute(const DesignPoint& design, std::uint64_t) const {
  ObjectiveValue v;
  v.c = analytic_flattening_cost(design);
  v.measurement.S_i = 1.0;
  v.measurement.S_m = 1.0 / v.c;
  v.measurement.mu = v.measurement.S_m;
  v.measurement.frame_of_max = 0.0;
  return v;
}

DesignProblem::DesignProblem(DesignObjective& objective, std::uint64_t seed, std::size_t workers)
    : objective_(objective), seed_(seed), workers_(workers) {}

optim::Vector DesignProblem::lower() const {
  const auto& b = objective_.bounds().lower;
  return {b.v, b.r, b.theta};
}

optim::Vector DesignProblem::upper() const {
  const auto& b = objective_.bounds().upper;
  return {b.v, b.r, b.theta};
}

double DesignProblem::evaluate(const optim::Vector& x) {
  return objective_.evaluate({x.at(0), x.at(1), x.at(2)}, seed_).c;
}

std::vector<double> DesignProblem::evaluate_batch(const std::vector<optim::Vector>& xs) {
  std::vector<DesignPoint> ds;
  ds.reserve(xs.size());
  for (const auto& x : xs) ds.push_back({x.at(0), x.at(1), x.at(2)});
  const auto vs = objective_.evaluate_batch(ds, seed_, workers_);
  std::vector<double> out;
  out.reserve(vs.size());
  for (const auto& v : vs) out.push_back(v.c);
  return out;
}

void write_measurement_header(std::ostream& out) {
  fmt::print(out, "design_v,design_r,design_theta,S_i,S_m,mu,c,frame_of_max\n");
}

void write_measurement_row(std::ostream& out, const DesignPoint& d, const imaging::MeasurementResult& m, double c) {
  fmt::print(out, "{:.6f},{:.6f},{:.6f},{:.0f},{:.0f},{:.9g},{:.9g},{:.3f}\n", d.v, d.r, d.theta, m.S_i, m.S_m, m.mu, c,
             m.frame_of_max);
}

void write_ledger_csv(std::ostream& out, const std::vector<LedgerRow>& rows) {
  fmt::print(out, "eval,seed,design_v,design_r,design_theta,S_i,S_m,mu,c,provenance,cost_tp,penalized,note\n");
  for (const auto& r : rows) {
    const auto& m = r.value.measurement;
    fmt::print(out, "{},{},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{},{:g},{},\"{}\"\n", r.index, r.seed,
               r.design.v, r.design.r, r.design.theta, m.S_i, m.S_m, m.mu, r.value.c,
               provenance_name(r.value.provenance), r.value.eval_cost, r.value.penalized ? 1 : 0, r.value.note);
  }
}

}  // namespace coldloop
