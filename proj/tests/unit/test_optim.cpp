#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "../oracles/kriging_oracle.hpp"
#include "coldloop/common.hpp"
#include "coldloop/objective.hpp"
#include "coldloop/optim/kriging.hpp"
#include "coldloop/optim/optimizers.hpp"

using namespace coldloop;
using namespace coldloop::optim;

namespace {

double sphere(const Vector& x) {
  double s = 0.0;
  for (double c : x) s += c * c;
  return s;
}

double rosenbrock(const Vector& x) {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < x.size(); ++k)
    s += 100.0 * (x[k + 1] - x[k] * x[k]) * (x[k + 1] - x[k] * x[k]) + (1.0 - x[k]) * (1.0 - x[k]);
  return s;
}

double branin(const Vector& x) {
  const double a = 1.0, b = 5.1 / (4.0 * units::kPi * units::kPi), c = 5.0 / units::kPi, r = 6.0, s = 10.0,
               t = 1.0 / (8.0 * units::kPi);
  const double u = x[1] - b * x[0] * x[0] + c * x[0] - r;
  return a * u * u + s * (1.0 - t) * std::cos(x[0]) + s;
}

bool monotone(const OptimizationTrace& t) {
  for (std::size_t i = 1; i < t.entries.size(); ++i)
    if (t.entries[i].best_f > t.entries[i - 1].best_f) return false;
  return true;
}

bool same_trace(const OptimizationTrace& a, const OptimizationTrace& b) {
  if (a.entries.size() != b.entries.size() || a.evaluated_x != b.evaluated_x || a.evaluated_f != b.evaluated_f)
    return false;
  for (std::size_t i = 0; i < a.entries.size(); ++i)
    if (a.entries[i].best_f != b.entries[i].best_f || a.entries[i].best_x != b.entries[i].best_x ||
        a.entries[i].cum_tp != b.entries[i].cum_tp)
      return false;
  return true;
}

std::vector<Vector> random_points(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vector> out(n, Vector(d));
  for (auto& x : out)
    for (auto& c : x) c = u(rng);
  return out;
}

}  // namespace

TEST_CASE("latin_hypercube") {
  const auto one = latin_hypercube(1, 4, 3);
  REQUIRE(one.size() == 1);
  for (double c : one[0]) CHECK((c >= 0.0 && c < 1.0));

  const auto s = latin_hypercube(20, 3, 11);
  for (std::size_t k = 0; k < 3; ++k) {
    std::vector<double> col;
    for (const auto& x : s) col.push_back(x[k]);
    std::sort(col.begin(), col.end());
    for (std::size_t i = 0; i < 20; ++i) {
      CHECK(col[i] >= i / 20.0);
      CHECK(col[i] < (i + 1) / 20.0);
    }
  }
  CHECK(latin_hypercube(20, 3, 11) == s);
  CHECK(latin_hypercube(20, 3, 12) != s);
  CHECK_THROWS_AS(latin_hypercube(0, 3, 1), Error);
}

TEST_CASE("normalization round trip") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int t = 0; t < 1000; ++t) {
    Vector lo(3), hi(3), x(3);
    for (int k = 0; k < 3; ++k) {
      lo[k] = u(rng);
      hi[k] = lo[k] + 0.1 + std::abs(u(rng));
      x[k] = lo[k] + (hi[k] - lo[k]) * (u(rng) + 100.0) / 200.0;
    }
    const Vector back = from_unit(to_unit(x, lo, hi), lo, hi);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(back[k] - x[k]) <= 1e-12 * std::max(1.0, std::abs(x[k])));
  }
  const Vector lo{3, 10, 0}, hi{12, 20, 30};
  CHECK(from_unit({0, 0, 0}, lo, hi) == lo);
  CHECK(from_unit({1, 1, 1}, lo, hi) == hi);
}

TEST_CASE("kriging matches a dense linear-solve oracle") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int model_id = 0; model_id < 20; ++model_id) {
    const auto X = random_points(5, 3, rng);
    Vector y(5), ls(3);
    for (auto& v : y) v = 4.0 * u(rng) - 2.0;
    for (auto& l : ls) l = 0.2 + 0.8 * u(rng);
    const KrigingModel m(X, y, ls);
    for (const auto& x : random_points(10, 3, rng)) {
      const auto p = m.predict(x);
      const auto o = oracle::kriging_predict(X, y, ls, m.nugget(), x);
      CHECK(std::abs(p.mean - o.mean) < 1e-8);
      CHECK(std::abs(p.sd * p.sd - std::max(o.variance, 0.0)) < 1e-8);
    }
  }
}

TEST_CASE("kriging interpolation and prior reversion") {
  std::mt19937_64 rng(7);
  const auto X = random_points(12, 3, rng);
  Vector y;
  for (const auto& x : X) y.push_back(std::sin(3.0 * x[0]) + x[1] * x[2]);
  const auto m = fit_kriging(X, y);
  CHECK(m.nugget() <= 1e-4);
  for (std::size_t i = 0; i < X.size(); ++i) {
    const auto p = m.predict(X[i]);
    CHECK(std::abs(p.mean - y[i]) < 1e-6);
    CHECK(p.sd < 1e-3 * std::sqrt(m.sigma2()) + 1e-6);
  }
  const auto far = m.predict({1e3, -1e3, 1e3});
  CHECK(far.mean == doctest::Approx(m.beta()).epsilon(1e-12));
  CHECK(far.sd == doctest::Approx(std::sqrt(m.sigma2())).epsilon(1e-12));
}

TEST_CASE("kriging on constant data") {
  std::mt19937_64 rng(9);
  const auto X = random_points(8, 2, rng);
  const Vector y(8, 3.25);
  const auto m = fit_kriging(X, y);
  CHECK(m.sigma2() < 1e-12);
  for (const auto& x : random_points(20, 2, rng)) {
    const auto p = m.predict(x);
    CHECK(p.mean == doctest::Approx(3.25).epsilon(1e-9));
    CHECK(p.sd < 1e-6);
  }
}

TEST_CASE("kriging reproduces sin(2 pi x) from ten points") {
  const auto X = latin_hypercube(10, 1, 3);
  Vector y;
  for (const auto& x : X) y.push_back(std::sin(2.0 * units::kPi * x[0]));
  const auto m = fit_kriging(X, y);
  std::mt19937_64 rng(4);
  double sse = 0.0;
  const auto test = random_points(50, 1, rng);
  for (const auto& x : test) {
    const double e = m.predict(x).mean - std::sin(2.0 * units::kPi * x[0]);
    sse += e * e;
  }
  CHECK(std::sqrt(sse / 50.0) < 0.05);
}

TEST_CASE("fit_kriging preconditions") {
  std::vector<Vector> X{{0.1, 0.2}, {0.3, 0.4}, {0.5, 0.9}, {0.1, 0.2}};
  CHECK_THROWS_AS(fit_kriging(X, {1, 2, 3, 4}), Error);  // duplicate rows
  X.pop_back();
  CHECK_THROWS_AS(fit_kriging(X, {1, 2, 3}), Error);  // n < dims + 2
  CHECK_THROWS_AS(fit_kriging({}, {}), Error);
}

TEST_CASE("expected improvement") {
  CHECK(expected_improvement(0.3, 0.0, 1.0) == 0.0);
  CHECK(expected_improvement(0.0, 1.0, 0.0) == doctest::Approx(0.398942).epsilon(1e-6));

  // Monte-Carlo estimate of E[max(f_min - Y, 0)], Y ~ N(0, 1).
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  double acc = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) acc += std::max(-g(rng), 0.0);
  CHECK(std::abs(acc / n - expected_improvement(0.0, 1.0, 0.0)) < 3e-3);

  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 10000; ++i) {
    const double m = u(rng), s = std::abs(u(rng)), f = u(rng);
    const double ei = expected_improvement(m, s, f);
    CHECK(ei >= 0.0);
    CHECK(ei >= std::max(f - m, 0.0) - 1e-12);
  }
}

TEST_CASE("DE operators") {
  CHECK(de_mutant({0, 0}, {2, 2}, {0, 0}, 0.5) == Vector{1, 1});
  std::mt19937_64 rng(3);
  const Vector target{1, 2, 3, 4}, mutant{5, 6, 7, 8};
  CHECK(binomial_crossover(target, mutant, 1.0, 2, rng) == mutant);
  const auto t0 = binomial_crossover(target, mutant, 0.0, 2, rng);
  CHECK(t0 == Vector{1, 2, 7, 4});
}

TEST_CASE("PSO") {
  SUBCASE("w = 1, c1 = c2 = 0 advances positions by constant velocities") {
    FunctionProblem p(sphere, Vector(3, -100.0), Vector(3, 100.0));
    PsoOptions o;
    o.particles = 6;
    o.generations = 3;
    o.w = 1.0;
    o.c1 = o.c2 = 0.0;
    o.initial_velocity = 0.01;
    std::vector<SwarmState> states;
    run_pso(p, o, 4, [&](const SwarmState& s) { states.push_back(s); });
    REQUIRE(states.size() == 3);
    for (std::size_t g = 1; g < 3; ++g)
      for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t k = 0; k < 3; ++k) {
          CHECK(states[g].velocities[i][k] == states[0].velocities[i][k]);
          CHECK(states[g].positions[i][k] ==
                doctest::Approx(states[g - 1].positions[i][k] + states[0].velocities[i][k]).epsilon(1e-15));
        }
  }
  SUBCASE("5-D sphere") {
    FunctionProblem p(sphere, Vector(5, -5.0), Vector(5, 5.0));
    const auto t = run_pso(p, {}, 1);
    CHECK(p.calls() == 2000);
    CHECK(t.calls == 2000);
    CHECK(t.cum_tp == 2000.0);
    CHECK(t.entries.size() == 100);
    CHECK(t.best_f < 1e-4);
    CHECK(monotone(t));
    FunctionProblem q(sphere, Vector(5, -5.0), Vector(5, 5.0));
    CHECK(same_trace(t, run_pso(q, {}, 1)));
  }
  SUBCASE("positions stay in bounds") {
    FunctionProblem p([](const Vector& x) { return -x[0] - x[1]; }, {0, 0}, {1, 2});
    const auto t = run_pso(p, {10, 20}, 2);
    for (const auto& x : t.evaluated_x) CHECK((x[0] >= 0 && x[0] <= 1 && x[1] >= 0 && x[1] <= 2));
    CHECK(t.best_f == doctest::Approx(-3.0));
  }
}

// Default F = 0.5, CR = 0.9, 20 x 200: the competence target for DE.
TEST_CASE("DE on 5-D Rosenbrock") {
  FunctionProblem p(rosenbrock, Vector(5, -2.048), Vector(5, 2.048));
  const auto t = run_de(p, {20, 200}, 1);
  CHECK(p.calls() == 4000);
  CHECK(t.calls == 4000);
  CHECK(t.entries.size() == 200);
  CHECK(t.best_f < 1e-2);
  CHECK(monotone(t));
  CHECK(t.final_population.size() == 20);
  FunctionProblem q(rosenbrock, Vector(5, -2.048), Vector(5, 2.048));
  CHECK(same_trace(t, run_de(q, {20, 200}, 1)));
  FunctionProblem r(rosenbrock, Vector(5, -2.048), Vector(5, 2.048));
  CHECK_THROWS_AS(run_de(r, {3, 10}, 1), Error);
}

TEST_CASE("DE with F = 0.8 on 5-D Rosenbrock over seeds") {
  int solved = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    FunctionProblem p(rosenbrock, Vector(5, -2.048), Vector(5, 2.048));
    solved += run_de(p, {20, 200, 0.8, 0.9}, seed).best_f < 1e-2;
  }
  CHECK(solved >= 5);
}

TEST_CASE("EGO on Branin") {
  // Dense-grid oracle for the minimum over [-5, 10] x [0, 15].
  double grid_min = 1e9;
  for (int i = 0; i <= 1500; ++i)
    for (int j = 0; j <= 1500; ++j) grid_min = std::min(grid_min, branin({-5.0 + 0.01 * i, 0.01 * j}));
  CHECK(grid_min == doctest::Approx(0.397887).epsilon(1e-3));

  FunctionProblem p(branin, {-5, 0}, {10, 15});
  EgoOptions o;
  o.n_init = 20;
  o.n_infill = 30;
  const auto t = run_ego(p, o, 1);
  CHECK(p.calls() == 50);
  CHECK(t.entries.size() == 50);
  CHECK(t.entries.back().cum_tp == 50.0);
  CHECK(t.best_f - grid_min < 0.05);
  CHECK(monotone(t));
  for (std::size_t i = 0; i < t.entries.size(); ++i) CHECK(t.entries[i].iteration == i + 1);
  FunctionProblem q(branin, {-5, 0}, {10, 15});
  CHECK(same_trace(t, run_ego(q, o, 1)));
}

TEST_CASE("budgets against the analytic design objective") {
  AnalyticObjective obj;
  DesignProblem problem(obj, 1);
  EgoOptions ego;
  ego.n_infill = 10;
  const auto te = run_ego(problem, ego, 3);
  CHECK(te.calls == 30);
  CHECK(te.cum_tp == 30.0);
  CHECK(obj.cost() == 30.0);
  for (const auto& x : te.evaluated_x) CHECK(obj.bounds().contains({x[0], x[1], x[2]}));

  AnalyticObjective obj2;
  DesignProblem p2(obj2, 1);
  const auto tp = run_pso(p2, {}, 3);
  CHECK(tp.cum_tp == 2000.0);
  CHECK(obj2.cost() <= 2000.0);
  CHECK(monotone(tp));

  std::ostringstream csv;
  write_trace_csv(csv, tp);
  std::istringstream lines(csv.str());
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  CHECK(header == "iteration,cum_tp,best_v,best_r,best_theta,best_c");
  CHECK(first.rfind("1,20,", 0) == 0);
}
