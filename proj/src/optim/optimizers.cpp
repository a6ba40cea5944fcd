#include "coldloop/optim/optimizers.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "coldloop/common.hpp"

namespace coldloop::optim {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) {
  // splitmix64 over the pair
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<Vector> latin_hypercube(std::size_t n, std::size_t dims, std::uint64_t seed) {
  if (n == 0) throw Error("latin_hypercube needs n >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Vector> out(n, Vector(dims));
  const double top = std::nextafter(1.0, 0.0);
  std::vector<std::size_t> perm(n);
  for (std::size_t k = 0; k < dims; ++k) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < n; ++i) {
      const double s = static_cast<double>(perm[i]);
      out[i][k] = std::min((s + unif(rng)) / static_cast<double>(n), top);
      // Keep the point inside its stratum under rounding.
      out[i][k] = std::max(out[i][k], s / static_cast<double>(n));
    }
  }
  return out;
}

void write_trace_csv(std::ostream& out, const OptimizationTrace& trace, std::vector<std::string> names) {
  const std::size_t dims = trace.best_x.size();
  if (names.empty()) {
    if (dims == 3) {
      names = {"v", "r", "theta"};
    } else {
      for (std::size_t k = 0; k < dims; ++k) names.push_back(fmt::format("x{}", k));
    }
  }
  if (names.size() != dims) throw Error("trace column names do not match the dimension");
  fmt::print(out, "iteration,cum_tp");
  for (const auto& n : names) fmt::print(out, ",best_{}", n);
  fmt::print(out, ",best_c\n");
  for (const auto& e : trace.entries) {
    fmt::print(out, "{},{:g}", e.iteration, e.cum_tp);
    for (double x : e.best_x) fmt::print(out, ",{:.9g}", x);
    fmt::print(out, ",{:.9g}\n", e.best_f);
  }
}

namespace {

Vector clamp_unit(Vector u) {
  for (auto& x : u) x = std::clamp(x, 0.0, 1.0);
  return u;
}

// Maps unit-cube proposals to the problem, counts calls and tracks the incumbent.
class Recorder {
 public:
  Recorder(Problem& problem, std::string algorithm)
      : problem_(problem), lo_(problem.lower()), hi_(problem.upper()) {
    if (lo_.size() != problem.dims() || hi_.size() != problem.dims()) throw Error("problem bounds mismatch dims");
    trace_.algorithm = std::move(algorithm);
    trace_.best_f = std::numeric_limits<double>::infinity();
  }

  Vector physical(const Vector& u) const {
    Vector x = from_unit(u, lo_, hi_);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = std::clamp(x[k], lo_[k], hi_[k]);
    return x;
  }

  // Evaluate unit-cube points in one batch; optionally append a trace entry per point.
  std::vector<double> evaluate(const std::vector<Vector>& units, bool mark_each) {
    std::vector<Vector> xs;
    xs.reserve(units.size());
    for (const auto& u : units) xs.push_back(physical(u));
    const auto fs = problem_.evaluate_batch(xs);
    if (fs.size() != xs.size()) throw Error("problem returned the wrong number of values");
    for (std::size_t i = 0; i < xs.size(); ++i) {
      ++trace_.calls;
      trace_.evaluated_x.push_back(xs[i]);
      trace_.evaluated_f.push_back(fs[i]);
      if (fs[i] < trace_.best_f) {
        trace_.best_f = fs[i];
        trace_.best_x = xs[i];
      }
      if (mark_each) mark(trace_.calls);
    }
    return fs;
  }

  void mark(std::size_t iteration) {
    trace_.cum_tp = static_cast<double>(trace_.calls) * problem_.unit_cost();
    trace_.entries.push_back({iteration, trace_.cum_tp, trace_.best_x, trace_.best_f});
  }

  void set_population(const std::vector<Vector>& units, const std::vector<double>& values) {
    trace_.final_population.clear();
    for (const auto& u : units) trace_.final_population.push_back(physical(u));
    trace_.final_values = values;
  }

  std::size_t dims() const { return lo_.size(); }
  OptimizationTrace finish() {
    trace_.cum_tp = static_cast<double>(trace_.calls) * problem_.unit_cost();
    return std::move(trace_);
  }

 private:
  Problem& problem_;
  Vector lo_, hi_;
  OptimizationTrace trace_;
};

double max_norm_distance(const Vector& a, const Vector& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

}  // namespace

Vector de_mutant(const Vector& a, const Vector& b, const Vector& c, double F) {
  if (a.size() != b.size() || a.size() != c.size()) throw Error("de_mutant: vectors differ in length");
  Vector m(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) m[k] = a[k] + F * (b[k] - c[k]);
  return m;
}

Vector binomial_crossover(const Vector& target, const Vector& mutant, double CR, std::size_t jrand,
                          std::mt19937_64& rng) {
  if (target.size() != mutant.size()) throw Error("binomial_crossover: vectors differ in length");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector trial(target.size());
  for (std::size_t k = 0; k < target.size(); ++k) {
    const double u = unif(rng);
    trial[k] = (u < CR || k == jrand) ? mutant[k] : target[k];
  }
  return trial;
}

OptimizationTrace run_de(Problem& problem, const DeOptions& o, std::uint64_t seed) {
  if (o.population < 4) throw Error("DE needs a population of at least 4");
  if (o.generations < 1) throw Error("DE needs at least one generation");
  Recorder rec(problem, "DE");
  const std::size_t np = o.population, d = rec.dims();
  std::mt19937_64 rng(derive_seed(seed, 0));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, np - 1), pick_dim(0, d - 1);

  std::vector<Vector> pop(np, Vector(d));
  for (auto& x : pop)
    for (auto& c : x) c = unif(rng);
  auto f = rec.evaluate(pop, false);
  rec.mark(1);

  std::vector<Vector> trials(np);
  for (std::size_t g = 2; g <= o.generations; ++g) {
    for (std::size_t i = 0; i < np; ++i) {
      std::size_t r1, r2, r3;
      do r1 = pick(rng); while (r1 == i);
      do r2 = pick(rng); while (r2 == i || r2 == r1);
      do r3 = pick(rng); while (r3 == i || r3 == r1 || r3 == r2);
      const Vector mutant = de_mutant(pop[r1], pop[r2], pop[r3], o.F);
      trials[i] = clamp_unit(binomial_crossover(pop[i], mutant, o.CR, pick_dim(rng), rng));
    }
    const auto ft = rec.evaluate(trials, false);
    for (std::size_t i = 0; i < np; ++i)
      if (ft[i] <= f[i]) {
        pop[i] = trials[i];
        f[i] = ft[i];
      }
    rec.mark(g);
  }
  rec.set_population(pop, f);
  return rec.finish();
}

OptimizationTrace run_pso(Problem& problem, const PsoOptions& o, std::uint64_t seed, const SwarmObserver& observer) {
  if (o.particles < 1 || o.generations < 1) throw Error("PSO needs at least one particle and one generation");
  Recorder rec(problem, "PSO");
  const std::size_t np = o.particles, d = rec.dims();
  std::mt19937_64 rng(derive_seed(seed, 0));
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  SwarmState s;
  s.positions.assign(np, Vector(d));
  s.velocities.assign(np, Vector(d));
  for (std::size_t i = 0; i < np; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      s.positions[i][k] = unif(rng);
      s.velocities[i][k] = o.initial_velocity * (2.0 * unif(rng) - 1.0);
    }
  auto f = rec.evaluate(s.positions, false);
  s.personal_best = s.positions;
  s.personal_best_f = f;
  s.global_best_f = std::numeric_limits<double>::infinity();
  auto update_global = [&] {
    for (std::size_t i = 0; i < np; ++i)
      if (s.personal_best_f[i] < s.global_best_f || s.global_best.empty()) {
        s.global_best_f = s.personal_best_f[i];
        s.global_best = s.personal_best[i];
      }
  };
  update_global();
  s.generation = 1;
  rec.mark(1);
  if (observer) observer(s);

  for (std::size_t g = 2; g <= o.generations; ++g) {
    for (std::size_t i = 0; i < np; ++i) {
      auto& x = s.positions[i];
      auto& v = s.velocities[i];
      for (std::size_t k = 0; k < d; ++k) {
        const double r1 = unif(rng), r2 = unif(rng);
        v[k] = o.w * v[k] + o.c1 * r1 * (s.personal_best[i][k] - x[k]) + o.c2 * r2 * (s.global_best[k] - x[k]);
        x[k] += v[k];
        if (x[k] < 0.0 || x[k] > 1.0) {
          x[k] = std::clamp(x[k], 0.0, 1.0);
          v[k] = 0.0;
        }
      }
    }
    f = rec.evaluate(s.positions, false);
    for (std::size_t i = 0; i < np; ++i)
      if (f[i] < s.personal_best_f[i]) {
        s.personal_best_f[i] = f[i];
        s.personal_best[i] = s.positions[i];
      }
    update_global();
    s.generation = g;
    rec.mark(g);
    if (observer) observer(s);
  }
  rec.set_population(s.positions, f);
  return rec.finish();
}

OptimizationTrace run_ego(Problem& problem, const EgoOptions& o, std::uint64_t seed) {
  if (o.n_init < 1) throw Error("EGO needs a positive budget");
  Recorder rec(problem, "EGO");
  const std::size_t d = rec.dims();
  if (o.n_infill > 0 && o.n_init < d + 2) throw Error("EGO needs n_init >= dims + 2 to fit the surrogate");

  std::vector<Vector> X = latin_hypercube(o.n_init, d, derive_seed(seed, 0));
  Vector y = rec.evaluate(X, true);

  auto is_duplicate = [&](const Vector& u) {
    for (const auto& x : X)
      if (max_norm_distance(u, x) < o.duplicate_tolerance) return true;
    return false;
  };

  const Vector zeros(d, 0.0), ones(d, 1.0);
  for (std::size_t it = 0; it < o.n_infill; ++it) {
    KrigingOptions ko = o.kriging;
    ko.seed = derive_seed(seed, 2 * it + 1);
    Vector candidate;
    try {
      const KrigingModel model = fit_kriging(X, y, ko);
      const double f_min = *std::min_element(y.begin(), y.end());
      FunctionProblem ei([&](const Vector& u) { return -expected_improvement(model, u, f_min); }, zeros, ones);
      const auto inner = run_de(ei, {o.inner_population, o.inner_generations, 0.5, 0.9}, derive_seed(seed, 2 * it + 2));
      candidate = inner.best_x;
      if (is_duplicate(candidate)) {
        for (auto& c : candidate) c = c + o.perturbation <= 1.0 ? c + o.perturbation : c - o.perturbation;
        if (is_duplicate(candidate)) {
          // Highest-EI non-duplicate member of the inner population.
          std::vector<std::size_t> order(inner.final_values.size());
          std::iota(order.begin(), order.end(), 0);
          std::stable_sort(order.begin(), order.end(),
                           [&](std::size_t a, std::size_t b) { return inner.final_values[a] < inner.final_values[b]; });
          candidate.clear();
          for (std::size_t k : order)
            if (!is_duplicate(inner.final_population[k])) {
              candidate = inner.final_population[k];
              break;
            }
        }
      }
    } catch (const NumericalError&) {
      candidate.clear();
    }
    if (candidate.empty()) {
      // No usable surrogate proposal: farthest of a seeded random sample from the data.
      std::mt19937_64 rng(derive_seed(seed, 2 * it + 2));
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      double best = -1.0;
      for (int k = 0; k < 2000; ++k) {
        Vector u(d);
        for (auto& c : u) c = unif(rng);
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& x : X) nearest = std::min(nearest, max_norm_distance(u, x));
        if (nearest > best) {
          best = nearest;
          candidate = u;
        }
      }
    }
    const double f = rec.evaluate({candidate}, true).front();
    X.push_back(candidate);
    y.push_back(f);
  }
  rec.set_population(X, y);
  return rec.finish();
}

}  // namespace coldloop::optim
