#include <doctest.h>

#include <random>
#include <regex>
#include <sstream>

#include "coldloop/md/eam.hpp"
#include "coldloop/md/forces.hpp"
#include "coldloop/md/impact.hpp"
#include "coldloop/md/integrator.hpp"
#include "coldloop/md/scene.hpp"
#include "coldloop/md/snapshot.hpp"

using namespace coldloop;
using namespace coldloop::md;

namespace {

const EAMPotential& copper() {
  static const EAMPotential pot = analytic_copper_potential();
  return pot;
}

// Count FCC sites (half-lattice points with even index sum) in [0, L)^3 by brute force.
std::size_t enumerate_fcc_sites(const Vec3& L, double a) {
  std::size_t n = 0;
  const double h = 0.5 * a;
  for (int i = 0; i * h < L[0] - 1e-9; ++i)
    for (int j = 0; j * h < L[1] - 1e-9; ++j)
      for (int k = 0; k * h < L[2] - 1e-9; ++k)
        if ((i + j + k) % 2 == 0) ++n;
  return n;
}

std::size_t enumerate_sphere_sites(double radius, double a) {
  std::size_t n = 0;
  const double h = 0.5 * a;
  const int m = static_cast<int>(radius / h) + 1;
  for (int i = -m; i <= m; ++i)
    for (int j = -m; j <= m; ++j)
      for (int k = -m; k <= m; ++k)
        if (((i + j + k) % 2 + 2) % 2 == 0 && (i * i + j * j + k * k) * h * h <= radius * radius + 1e-9) ++n;
  return n;
}

AtomSystem open_box(std::initializer_list<Vec3> positions, double mass = 63.546) {
  AtomSystem s;
  s.box.lengths = {100.0, 100.0, 100.0};
  s.box.boundary = {Boundary::Open, Boundary::Open, Boundary::Open};
  std::int64_t id = 1;
  for (const auto& p : positions) s.add({id++, p, {}, mass, p, Group::Particle});
  return s;
}

double energy(const AtomSystem& s) { return compute_forces(s, copper()).potential_energy; }

// Central-difference gradient of the total energy.
std::vector<Vec3> numeric_forces(AtomSystem s, double h) {
  std::vector<Vec3> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    for (int k = 0; k < 3; ++k) {
      const double x0 = s.positions[i][k];
      s.positions[i][k] = x0 + h;
      const double ep = energy(s);
      s.positions[i][k] = x0 - h;
      const double em = energy(s);
      s.positions[i][k] = x0;
      out[i][k] = -(ep - em) / (2.0 * h);
    }
  return out;
}

double relative_force_error(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Vec3 d = a[i] - b[i];
    num += dot(d, d);
    den += dot(a[i], a[i]);
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

class HarmonicDimer : public ForceModel {
 public:
  HarmonicDimer(double k, double r0) : k_(k), r0_(r0) {}
  double compute(const AtomSystem& s, std::vector<Vec3>& f) override {
    const Vec3 d = s.positions[1] - s.positions[0];
    const double r = norm(d);
    const double du = k_ * (r - r0_);
    f.assign(2, Vec3{});
    f[0] = (du / r) * d;
    f[1] = (-du / r) * d;
    return 0.5 * k_ * (r - r0_) * (r - r0_);
  }

 private:
  double k_, r0_;
};

class ConstantForce : public ForceModel {
 public:
  explicit ConstantForce(Vec3 f) : f_(f) {}
  double compute(const AtomSystem& s, std::vector<Vec3>& f) override {
    f.assign(s.size(), f_);
    return 0.0;
  }

 private:
  Vec3 f_;
};

}  // namespace

TEST_CASE("build_fcc_region counts lattice sites") {
  const double a = 3.61;
  SUBCASE("10x10x5 cells") {
    const Vec3 L{36.1, 36.1, 18.05};
    auto s = build_fcc_region(L, a, Group::Substrate);
    CHECK(s.size() == 2000);
    CHECK(s.size() == enumerate_fcc_sites(L, a));
  }
  SUBCASE("single cell") { CHECK(build_fcc_region({a, a, a}, a, Group::Substrate).size() == 4); }
  SUBCASE("partial cells match brute force") {
    const Vec3 L{20.0, 13.3, 9.0};
    CHECK(build_fcc_region(L, a, Group::Substrate).size() == enumerate_fcc_sites(L, a));
  }
  SUBCASE("reference equals position, ids unique") {
    auto s = build_fcc_region({7.22, 7.22, 7.22}, a, Group::FixedWall);
    s.check_unique_ids();
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(s.positions[i] == s.reference_positions[i]);
      CHECK(s.groups[i] == Group::FixedWall);
    }
  }
  SUBCASE("smaller than one cell is rejected") {
    CHECK_THROWS_WITH_AS(build_fcc_region({3.0, 10.0, 10.0}, a, Group::Substrate), doctest::Contains("smaller than one"),
                         Error);
  }
}

TEST_CASE("build_sphere") {
  const double a = 3.61;
  const auto r15 = build_sphere(15.0, a);
  CHECK(r15.size() >= 500);
  CHECK(r15.size() <= 2000);
  CHECK(build_sphere(10.0, a).size() == enumerate_sphere_sites(10.0, a));
  CHECK(build_sphere(20.0, a).size() == enumerate_sphere_sites(20.0, a));
  for (auto g : r15.groups) CHECK(g == Group::Particle);
  CHECK_THROWS_AS(build_sphere(1.5, a, 1.0, {0.0, 20.0}), Error);
  CHECK_THROWS_AS(build_sphere(25.0, a), BoundsError);
}

TEST_CASE("assemble_scene geometry and velocities") {
  SceneConfig cfg;
  cfg.substrate_lengths = {30.0, 30.0, 12.0};
  cfg.temperature = 0.0;
  const double a = cfg.lattice_constant;
  const double m = copper().atomic_mass();

  SUBCASE("normal impact") {
    auto s = assemble_scene({8.0, 10.0, 0.0}, cfg, m);
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s.groups[i] == Group::Particle) {
        CHECK(s.velocities[i][0] == 0.0);
        CHECK(s.velocities[i][1] == 0.0);
        CHECK(s.velocities[i][2] == -8.0);
      }
  }
  SUBCASE("angled impact") {
    const Vec3 v = impact_velocity({8.0, 15.0, 30.0});
    CHECK(v[0] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(v[1] == 0.0);
    CHECK(v[2] == doctest::Approx(-8.0 * std::sqrt(3.0) / 2.0).epsilon(1e-12));
    CHECK(v[2] == doctest::Approx(-6.9282).epsilon(1e-5));
  }
  SUBCASE("stand-off, walls, lateral periodicity") {
    auto s = assemble_scene({8.0, 10.0, 0.0}, cfg, m);
    const double top = substrate_top(s);
    double low = 1e9, sub_min = 1e9;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s.groups[i] == Group::Particle) low = std::min(low, s.positions[i][2]);
      else sub_min = std::min(sub_min, s.positions[i][2]);
    }
    CHECK(std::abs(low - top - 40.0) <= 0.5 * a);
    CHECK(s.box.lengths[0] == doctest::Approx(8 * a));
    CHECK(s.box.boundary[2] == Boundary::Open);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const bool bottom = s.reference_positions[i][2] < 2 * 0.5 * a - 1e-6;
      if (s.groups[i] != Group::Particle) CHECK((s.groups[i] == Group::FixedWall) == bottom);
    }
    s.check_unique_ids();
  }
  SUBCASE("overlap is rejected") {
    cfg.standoff = 0.5;
    CHECK_THROWS_WITH_AS(assemble_scene({8.0, 10.0, 0.0}, cfg, m), doctest::Contains("overlaps"), Error);
  }
}

TEST_CASE("init_velocities") {
  auto s = build_fcc_region({14.44, 14.44, 14.44}, 3.61, Group::Substrate, 63.546);
  SUBCASE("zero temperature") {
    init_velocities(s, 0.0, 7);
    for (const auto& v : s.velocities) CHECK(norm(v) == 0.0);
  }
  SUBCASE("exact temperature, zero momentum, deterministic") {
    init_velocities(s, 298.0, 7);
    CHECK(substrate_temperature(s) == doctest::Approx(298.0).epsilon(1e-9));
    CHECK(norm(s.momentum()) < 1e-9);
    auto t = s;
    init_velocities(t, 298.0, 7);
    CHECK(t.velocities == s.velocities);
    init_velocities(t, 298.0, 8);
    CHECK(t.velocities != s.velocities);
  }
  SUBCASE("walls and particle untouched") {
    s.groups[0] = Group::FixedWall;
    s.groups[1] = Group::Particle;
    s.velocities[1] = {1.0, 2.0, 3.0};
    init_velocities(s, 298.0, 3);
    CHECK(norm(s.velocities[0]) == 0.0);
    CHECK(s.velocities[1] == Vec3{1.0, 2.0, 3.0});
  }
  CHECK_THROWS(init_velocities(s, -1.0, 1));
}

TEST_CASE("load_eam parses funcfl and reports errors by line") {
  const std::string good =
      "synthetic\n"
      "29 63.546 3.615 FCC\n"
      "5 0.5 5 1.0 3.5\n"
      "0 -1 -2 -2.5 -2.7\n"
      "1 0.8 0.5 0.2 0\n"
      "3.0 2.0 1.0 0.5 0\n";
  SUBCASE("structure") {
    std::istringstream in(good);
    auto p = load_eam(in);
    CHECK(p.embedding_table().size() == 5);
    CHECK(p.density_table().size() == 5);
    CHECK(p.r_phi_table().size() == 5);
    CHECK(p.cutoff() == 3.5);
    CHECK(p.lattice_constant() == 3.615);
    CHECK(p.r_phi_table()[1] == doctest::Approx(kZ2ToRPhi * 0.64));
    CHECK(p.density(2.0) == doctest::Approx(1.0));
    CHECK(p.density(3.6) == 0.0);
  }
  SUBCASE("Nr mismatching array length") {
    std::string bad = good;
    bad.replace(bad.find("5 0.5 5 1.0"), 11, "5 0.5 6 1.0");
    std::istringstream in(bad);
    CHECK_THROWS_AS(load_eam(in), ParseError);
  }
  SUBCASE("extra values") {
    std::istringstream in(good + "7\n");
    try {
      load_eam(in);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 7);
    }
  }
  SUBCASE("non-numeric token names its line") {
    std::string bad = good;
    bad.replace(bad.find("0.8"), 3, "abc");
    std::istringstream in(bad);
    try {
      load_eam(in);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 5);
      CHECK(std::string(e.what()).find("abc") != std::string::npos);
    }
  }
  SUBCASE("funcfl write then load") {
    std::istringstream in(good);
    const auto src = load_eam(in);
    std::ostringstream out;
    write_funcfl(out, src);
    std::istringstream back(out.str());
    auto p = load_eam(back);
    CHECK(p.embedding_table() == src.embedding_table());
    CHECK(p.density_table() == src.density_table());
    for (std::size_t i = 0; i < p.r_phi_table().size(); ++i)
      CHECK(p.r_phi_table()[i] == doctest::Approx(src.r_phi_table()[i]).epsilon(1e-12));
  }
  SUBCASE("funcfl refuses an attractive pair term") {
    std::ostringstream out;
    CHECK_THROWS_AS(write_funcfl(out, copper()), Error);
  }
  SUBCASE("setfl write then load") {
    std::ostringstream out;
    write_setfl(out, copper());
    std::istringstream in(out.str());
    auto p = load_eam(in);
    CHECK(p.embedding_table() == copper().embedding_table());
    CHECK(p.density_table() == copper().density_table());
    CHECK(p.r_phi_table() == copper().r_phi_table());
    CHECK(p.cutoff() == copper().cutoff());
    CHECK(p.atomic_mass() == doctest::Approx(copper().atomic_mass()).epsilon(1e-9));
    for (double r : {2.3, 2.556, 3.0, 4.7})
      CHECK(p.pair(r) == doctest::Approx(copper().pair(r)).epsilon(1e-12));
  }
}

TEST_CASE("load_eam parses setfl") {
  const std::string good =
      "c1\nc2\nc3\n"
      "1 Cu\n"
      "5 0.5 5 1.0 3.5\n"
      "29 63.546 3.615 FCC\n"
      "0 -1 -2 -2.5 -2.7\n"
      "1 0.8 0.5 0.2 0\n"
      "3.0 2.0 -1.0 -0.5 0\n";
  std::istringstream in(good);
  auto p = load_eam(in);
  CHECK(p.header().comment == "c1");
  CHECK(p.lattice_constant() == 3.615);
  CHECK(p.r_phi_table()[2] == -1.0);
  CHECK(p.density(2.0) == doctest::Approx(0.5));
  CHECK(p.pair(2.0) == doctest::Approx(-0.5));

  std::string two = good;
  two.replace(two.find("1 Cu"), 4, "2 Cu Ag");
  std::istringstream in2(two);
  try {
    load_eam(in2);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
  std::string bad = good;
  bad.replace(bad.find("-0.5"), 4, "x0.5");
  std::istringstream in3(bad);
  try {
    load_eam(in3);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 9);
  }
}

TEST_CASE("analytic copper table reproduces its documented cohesive energy") {
  const auto& pot = copper();
  std::smatch m;
  const std::string comment = pot.header().comment;
  REQUIRE(std::regex_search(comment, m, std::regex(R"(Ec=([0-9.]+))")));
  const double documented = std::stod(m[1]);

  const double a = pot.lattice_constant();
  // Direct lattice sum around one site using the interpolated tables.
  double rho = 0.0, pair = 0.0;
  for (int i = -4; i <= 4; ++i)
    for (int j = -4; j <= 4; ++j)
      for (int k = -4; k <= 4; ++k) {
        if ((i + j + k) % 2 != 0 || (i == 0 && j == 0 && k == 0)) continue;
        const double r = 0.5 * a * std::sqrt(double(i * i + j * j + k * k));
        rho += pot.density(r);
        pair += pot.pair(r);
      }
  const double lattice_sum = pot.embed(rho) + 0.5 * pair;
  CHECK(std::abs(-lattice_sum - documented) < 0.01 * documented);

  // Same quantity through the force engine on a periodic block.
  auto bulk = build_fcc_region({4 * a, 4 * a, 4 * a}, a, Group::Substrate, pot.atomic_mass());
  bulk.box.boundary = {Boundary::Periodic, Boundary::Periodic, Boundary::Periodic};
  const auto res = compute_forces(bulk, pot);
  const double per_atom = res.potential_energy / static_cast<double>(bulk.size());
  CHECK(per_atom == doctest::Approx(lattice_sum).epsilon(1e-12));
  for (const auto& f : res.forces) CHECK(norm(f) < 1e-10);
}

namespace {

// Energy per atom of a perfect lattice from neighbour shells, using the tables.
double site_energy(const EAMPotential& pot, const std::vector<Vec3>& neighbours) {
  double rho = 0.0, pair = 0.0;
  for (const auto& d : neighbours) {
    const double r = norm(d);
    rho += pot.density(r);
    pair += pot.pair(r);
  }
  return pot.embed(rho) + 0.5 * pair;
}

std::vector<Vec3> fcc_shells(double a) {
  std::vector<Vec3> out;
  for (int i = -4; i <= 4; ++i)
    for (int j = -4; j <= 4; ++j)
      for (int k = -4; k <= 4; ++k)
        if ((i + j + k) % 2 == 0 && (i || j || k)) out.push_back((0.5 * a) * Vec3{double(i), double(j), double(k)});
  return out;
}

// Ideal hcp with the same nearest-neighbour distance as fcc of lattice constant a.
std::vector<Vec3> hcp_shells(double a) {
  const double d = a / std::sqrt(2.0), c = d * std::sqrt(8.0 / 3.0);
  const Vec3 a1{d, 0, 0}, a2{0.5 * d, 0.5 * std::sqrt(3.0) * d, 0}, a3{0, 0, c};
  const Vec3 b = (1.0 / 3.0) * (a1 + a2) + 0.5 * a3;
  std::vector<Vec3> out;
  for (int i = -5; i <= 5; ++i)
    for (int j = -5; j <= 5; ++j)
      for (int k = -3; k <= 3; ++k)
        for (const Vec3& base : {Vec3{0, 0, 0}, b}) {
          const Vec3 v = double(i) * a1 + double(j) * a2 + double(k) * a3 + base;
          if (norm(v) > 1e-9 && norm(v) < 7.0) out.push_back(v);
        }
  return out;
}

}  // namespace

TEST_CASE("analytic copper lattice properties") {
  const auto& pot = copper();
  // Equilibrium lattice constant from a scan of the fcc energy.
  double best_a = 0.0, best_e = 1e9;
  for (int k = 0; k <= 300; ++k) {
    const double a = 3.5 + 0.001 * k;
    const double e = site_energy(pot, fcc_shells(a));
    if (e < best_e) best_e = e, best_a = a;
  }
  CHECK(best_a == doctest::Approx(pot.lattice_constant()).epsilon(0.002));
  // Bulk modulus B = a^2 E'' / (9 V), V = a^3 / 4, in GPa.
  const double h = 1e-3, a0 = best_a;
  const double e2 = (site_energy(pot, fcc_shells(a0 + h)) - 2 * best_e + site_energy(pot, fcc_shells(a0 - h))) / (h * h);
  const double bulk_gpa = a0 * a0 * e2 / (9.0 * a0 * a0 * a0 / 4.0) * 160.21766;
  CHECK(bulk_gpa == doctest::Approx(138.0).epsilon(0.05));
  // fcc is the ground state and hcp lies above it: a positive stacking fault energy.
  const double dE = site_energy(pot, hcp_shells(a0)) - best_e;
  const double area = 0.5 * std::sqrt(3.0) * a0 * a0 / 2.0;  // per atom on a {111} plane
  const double sfe_mj = 2.0 * dE / area * 16021.766;
  CHECK(sfe_mj > 20.0);
  CHECK(sfe_mj < 100.0);
}

TEST_CASE("compute_forces") {
  const auto& pot = copper();
  SUBCASE("isolated atom") {
    auto s = open_box({{50, 50, 50}});
    auto r = compute_forces(s, pot);
    CHECK(norm(r.forces[0]) == 0.0);
    CHECK(r.potential_energy == pot.embed(0.0));
  }
  SUBCASE("dimer beyond cutoff") {
    auto s = open_box({{50, 50, 50}, {50 + pot.cutoff(), 50, 50}});
    auto r = compute_forces(s, pot);
    CHECK(norm(r.forces[0]) == 0.0);
    CHECK(norm(r.forces[1]) == 0.0);
  }
  SUBCASE("dimer at 2.5 A matches finite differences") {
    auto s = open_box({{50, 50, 50}, {52.5, 50, 50}});
    auto r = compute_forces(s, pot);
    CHECK(relative_force_error(r.forces, numeric_forces(s, 1e-5)) < 1e-6);
    CHECK(r.forces[0][0] == doctest::Approx(-r.forces[1][0]).epsilon(1e-14));
  }
  SUBCASE("perturbed cluster: finite differences, third law") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    auto s = build_fcc_region({7.22, 7.22, 7.22}, 3.61, Group::Particle, pot.atomic_mass());
    s.box.lengths = {40, 40, 40};
    s.box.boundary = {Boundary::Open, Boundary::Open, Boundary::Open};
    s.translate({10, 10, 10});
    for (int trial = 0; trial < 5; ++trial) {
      auto t = s;
      for (auto& p : t.positions) p = p + Vec3{u(rng), u(rng), u(rng)};
      auto r = compute_forces(t, pot);
      CHECK(relative_force_error(r.forces, numeric_forces(t, 1e-5)) < 1e-5);
      Vec3 sum{};
      for (const auto& f : r.forces) sum = sum + f;
      CHECK(norm(sum) < 1e-9);
    }
  }
  SUBCASE("atoms two cutoffs away do not touch a force") {
    auto s = open_box({{10, 10, 10}, {12.4, 10, 10}, {14.8, 10, 10}, {30, 10, 10}, {32.4, 10, 10}});
    auto before = compute_forces(s, pot).forces[0];
    s.positions[3] = s.positions[3] + Vec3{0.3, -0.2, 0.1};
    s.positions[4] = s.positions[4] + Vec3{-0.1, 0.1, 0.0};
    auto after = compute_forces(s, pot).forces[0];
    CHECK(before == after);
  }
  SUBCASE("overlap is diagnosed") {
    auto s = open_box({{50, 50, 50}, {50 + 0.5 * pot.min_distance(), 50, 50}});
    CHECK_THROWS_AS(compute_forces(s, pot), NumericalError);
  }
}

TEST_CASE("velocity Verlet") {
  SUBCASE("free particle") {
    auto s = open_box({{1, 2, 3}}, 2.0);
    s.velocities[0] = {0.5, -1.0, 2.0};
    ConstantForce zero({0, 0, 0});
    VelocityVerlet vv(s, zero);
    vv.step(0.01);
    CHECK(s.positions[0][0] == 1 + 0.5 * 0.01);
    CHECK(s.positions[0][1] == 2 - 1.0 * 0.01);
    CHECK(s.positions[0][2] == 3 + 2.0 * 0.01);
  }
  SUBCASE("constant force") {
    const double m = 2.0, dt = 0.01;
    const Vec3 f{0.3, 0.0, -0.6};
    auto s = open_box({{0, 0, 0}}, m);
    s.velocities[0] = {1.0, 0.0, 0.0};
    ConstantForce cf(f);
    VelocityVerlet vv(s, cf);
    vv.step(dt);
    const double acc = units::kForceToAccel / m;
    CHECK(s.positions[0][0] == doctest::Approx(1.0 * dt + 0.5 * acc * f[0] * dt * dt).epsilon(1e-13));
    CHECK(s.positions[0][2] == doctest::Approx(0.5 * acc * f[2] * dt * dt).epsilon(1e-13));
    CHECK(s.velocities[0][2] == doctest::Approx(acc * f[2] * dt).epsilon(1e-13));
  }
  SUBCASE("harmonic dimer conserves energy") {
    auto s = open_box({{0, 0, 0}, {2.7, 0, 0}}, 63.546);
    HarmonicDimer h(1.0, 2.5);
    VelocityVerlet vv(s, h);
    const double e0 = vv.total_energy();
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      vv.step(0.001);
      worst = std::max(worst, std::abs(vv.total_energy() - e0));
    }
    CHECK(worst / e0 < 1e-4);
    // Analytic oscillator: separation follows r0 + A cos(w t).
    const double mu = 63.546 / 2.0;
    const double w = std::sqrt(1.0 * units::kForceToAccel / mu);
    const double expected = 2.5 + 0.2 * std::cos(w * 1.0);
    CHECK(norm(s.positions[1] - s.positions[0]) == doctest::Approx(expected).epsilon(1e-3));
  }
  SUBCASE("fixed wall atoms stay put") {
    auto s = open_box({{0, 0, 0}});
    s.groups[0] = Group::FixedWall;
    ConstantForce cf({1, 1, 1});
    VelocityVerlet vv(s, cf);
    vv.step(0.001);
    CHECK(s.positions[0] == Vec3{0, 0, 0});
    CHECK(norm(s.velocities[0]) == 0.0);
  }
  SUBCASE("periodic wrap") {
    AtomSystem s;
    s.box.lengths = {10, 10, 10};
    s.box.boundary = {Boundary::Periodic, Boundary::Periodic, Boundary::Open};
    s.add({1, {9.99, 5, 5}, {1.0, 0, 0}, 1.0, {9.99, 5, 5}, Group::Particle});
    ConstantForce zero({0, 0, 0});
    VelocityVerlet vv(s, zero);
    vv.step(0.02);
    CHECK(s.positions[0][0] == doctest::Approx(0.01));
    CHECK(s.displacement(0)[0] == doctest::Approx(0.02));
  }
}

TEST_CASE("momentum is conserved in an open cluster") {
  const auto& pot = copper();
  auto s = build_sphere(10.0, 3.61, pot.atomic_mass());
  s.box.lengths = {100, 100, 100};
  s.translate({50, 50, 50});
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  for (auto& v : s.velocities) v = {g(rng), g(rng), g(rng)};
  const Vec3 p0 = s.momentum();
  EAMForceField ff(pot);
  VelocityVerlet vv(s, ff);
  for (int k = 0; k < 1000; ++k) vv.step(0.001);
  CHECK(norm(s.momentum() - p0) / norm(p0) < 1e-9);
}

TEST_CASE("virial stress and Von Mises") {
  const auto& pot = copper();
  SUBCASE("Von Mises analytic cases") {
    CHECK(von_mises({7, 7, 7, 0, 0, 0}) == doctest::Approx(0.0));
    CHECK(von_mises({100, 0, 0, 0, 0, 0}) == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(von_mises({0, 0, 0, 50, 0, 0}) == doctest::Approx(50.0 * std::sqrt(3.0)).epsilon(1e-14));
    CHECK(von_mises({0, 0, 0, 50, 0, 0}) == doctest::Approx(86.6025).epsilon(1e-6));
  }
  SUBCASE("stationary isolated atom") {
    auto s = open_box({{5, 5, 5}});
    const auto t = virial_stress(s, pot)[0];
    CHECK(t.xx == 0.0);
    CHECK(t.xy == 0.0);
  }
  SUBCASE("stationary dimer") {
    const double d = 2.4;
    auto s = open_box({{10, 10, 10}, {10 + d, 10, 10}});
    const auto r = compute_forces(s, pot);
    const double f12 = r.forces[0][0];  // force on atom 1 from atom 2 (only pair)
    const auto sys = system_stress(virial_stress(s, pot), 1.0);
    CHECK(sys.xx == doctest::Approx(d * f12).epsilon(1e-12));
    CHECK(sys.yy == 0.0);
    CHECK(sys.zz == 0.0);
    CHECK(sys.xy == 0.0);
  }
  SUBCASE("moving atom, kinetic part only") {
    auto s = open_box({{5, 5, 5}});
    s.velocities[0] = {3.0, 0, 0};
    const auto t = virial_stress(s, pot)[0];
    CHECK(t.xx == doctest::Approx(-63.546 * 9.0 * units::kMvv2e).epsilon(1e-14));
  }
}

TEST_CASE("snapshot dump round trip") {
  Snapshot s;
  s.time = 1.5;
  s.box = {10, 20, 30};
  s.atoms = {{1, Group::FixedWall, {0.1, 0.2, 0.3}, 1.25}, {2, Group::Particle, {1, 2, 3}, 0.0}};
  std::stringstream io;
  write_dump(io, s);
  auto back = read_dump(io);
  CHECK(back.time == 1.5);
  CHECK_FALSE(back.pre_impact);
  REQUIRE(back.atoms.size() == 2);
  CHECK(back.atoms[0].group == Group::FixedWall);
  CHECK(back.atoms[1].position == Vec3{1, 2, 3});
  CHECK(back.atoms[0].von_mises == 1.25);

  std::istringstream bad("TIME 0\nNATOMS 2\nBOX 1 1 1\n2 0 0 0 0 0\n1 0 0 0 0 0\n");
  CHECK_THROWS_AS(read_dump(bad), ParseError);
}

TEST_CASE("run_impact on a small scene") {
  ImpactConfig c;
  c.scene.substrate_lengths = {30.0, 30.0, 11.0};
  c.scene.radius_range = {5.0, 20.0};
  c.post_contact_time = 1.0;
  c.equilibration_time = 0.2;
  const DesignPoint d{8.0, 6.0, 0.0};
  const auto run = run_impact(d, c, copper());
  CHECK(run.t_end == doctest::Approx(40.0 / 8.0 + 1.0));
  CHECK(run.frames.size() == static_cast<std::size_t>(std::floor(run.t_end / 0.5)) + 1);
  CHECK(run.frames.front().time == 0.0);
  CHECK(run.frames.front().pre_impact);
  for (std::size_t k = 1; k < run.frames.size(); ++k) {
    CHECK(run.frames[k].time > run.frames[k - 1].time);
    CHECK_FALSE(run.frames[k].pre_impact);
  }
  // Ballistic arrival at the interaction range of the surface.
  const double ballistic = (40.0 - copper().cutoff()) / 8.0;
  CHECK(run.contact_time == doctest::Approx(ballistic).epsilon(0.05));

  const auto again = run_impact(d, c, copper());
  std::ostringstream a, b;
  write_dump(a, run.frames.back());
  write_dump(b, again.frames.back());
  CHECK(a.str() == b.str());
}
