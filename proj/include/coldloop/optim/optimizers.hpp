#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "coldloop/optim/kriging.hpp"
#include "coldloop/optim/problem.hpp"

namespace coldloop::optim {

/// n points in [0,1)^dims, one per stratum [k/n, (k+1)/n) in every dimension.
std::vector<Vector> latin_hypercube(std::size_t n, std::size_t dims, std::uint64_t seed);

/// Independent stream seed for sub-task `k` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k);

struct TraceEntry {
  std::size_t iteration = 0;  // EGO: true evaluation index; PSO/DE: generation
  double cum_tp = 0.0;        // cumulative charged evaluations
  Vector best_x;              // physical units
  double best_f = 0.0;
};

/// Incumbent history of one optimization run plus every true evaluation it issued.
struct OptimizationTrace {
  std::string algorithm;
  std::vector<TraceEntry> entries;
  Vector best_x;
  double best_f = 0.0;
  std::size_t calls = 0;  // true evaluations requested
  double cum_tp = 0.0;    // calls * problem.unit_cost()
  std::vector<Vector> evaluated_x;
  std::vector<double> evaluated_f;
  std::vector<Vector> final_population;  // physical units
  std::vector<double> final_values;
};

/// `iteration,cum_tp,best_<name>...,best_c`. Default names are v,r,theta for three
/// dimensions and x0,x1,... otherwise.
void write_trace_csv(std::ostream& out, const OptimizationTrace& trace, std::vector<std::string> names = {});

struct EgoOptions {
  std::size_t n_init = 20;
  std::size_t n_infill = 100;
  std::size_t inner_population = 20;   // inner DE on expected improvement
  std::size_t inner_generations = 100;  // 20 x 100 = 2000 surrogate evaluations per infill
  double duplicate_tolerance = 5e-7;    // max-norm in the unit cube
  double perturbation = 1e-6;
  KrigingOptions kriging{};
  std::size_t workers = 1;  // initial design only
};

struct PsoOptions {
  std::size_t particles = 20;
  std::size_t generations = 100;  // the initial swarm counts as generation 1
  double w = 0.729;
  double c1 = 1.49445;
  double c2 = 1.49445;
  double initial_velocity = 0.2;  // U[-a, a] per unit-cube coordinate
};

struct DeOptions {
  std::size_t population = 20;
  std::size_t generations = 100;  // the initial population counts as generation 1
  double F = 0.5;
  double CR = 0.9;
};

/// Swarm snapshot after a generation, in unit-cube coordinates.
struct SwarmState {
  std::size_t generation = 0;
  std::vector<Vector> positions, velocities, personal_best;
  std::vector<double> personal_best_f;
  Vector global_best;
  double global_best_f = 0.0;
};
using SwarmObserver = std::function<void(const SwarmState&)>;

/// Kriging EGO: Latin hypercube start, then single-point expected-improvement infill.
/// Exactly n_init + n_infill true evaluations; one trace entry per evaluation.
OptimizationTrace run_ego(Problem& problem, const EgoOptions& options, std::uint64_t seed);

/// Global-best PSO in the unit cube with clamping (velocity component zeroed on clamp).
/// Exactly particles * generations true evaluations; one trace entry per generation.
OptimizationTrace run_pso(Problem& problem, const PsoOptions& options, std::uint64_t seed,
                          const SwarmObserver& observer = {});

/// DE/rand/1/bin with clamping and greedy selection.
/// Exactly population * generations true evaluations; one trace entry per generation.
OptimizationTrace run_de(Problem& problem, const DeOptions& options, std::uint64_t seed);

/// x_r1 + F (x_r2 - x_r3).
Vector de_mutant(const Vector& x_r1, const Vector& x_r2, const Vector& x_r3, double F);
/// Take the mutant coordinate where U[0,1) < CR or at index jrand, else the target's.
Vector binomial_crossover(const Vector& target, const Vector& mutant, double CR, std::size_t jrand,
                          std::mt19937_64& rng);

}  // namespace coldloop::optim
