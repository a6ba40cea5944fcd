#include "coldloop/md/scene.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <random>

namespace coldloop::md {

namespace {

// Basis of the conventional FCC cell in units of the lattice constant.
constexpr std::array<Vec3, 4> kFccBasis{{{0.0, 0.0, 0.0}, {0.5, 0.5, 0.0}, {0.5, 0.0, 0.5}, {0.0, 0.5, 0.5}}};
constexpr double kEdgeTol = 1e-9;

}  // namespace

AtomSystem build_fcc_region(const Vec3& lengths, double a, Group group, double mass) {
  if (!(a > 0.0)) throw Error("lattice constant must be positive");
  for (int k = 0; k < 3; ++k)
    if (lengths[k] < a - kEdgeTol)
      throw Error(fmt::format("region {:.4g} x {:.4g} x {:.4g} A is smaller than one {:.4g} A FCC cell along axis {}",
                              lengths[0], lengths[1], lengths[2], a, "xyz"[k]));

  std::array<int, 3> cells{};
  for (int k = 0; k < 3; ++k) cells[k] = static_cast<int>(std::ceil(lengths[k] / a - kEdgeTol));

  AtomSystem out;
  out.box.lengths = lengths;
  std::int64_t id = 1;
  for (int iz = 0; iz < cells[2]; ++iz)
    for (int iy = 0; iy < cells[1]; ++iy)
      for (int ix = 0; ix < cells[0]; ++ix)
        for (const auto& b : kFccBasis) {
          const Vec3 p{(ix + b[0]) * a, (iy + b[1]) * a, (iz + b[2]) * a};
          if (p[0] >= lengths[0] - kEdgeTol || p[1] >= lengths[1] - kEdgeTol || p[2] >= lengths[2] - kEdgeTol)
            continue;
          out.add({id++, p, {}, mass, p, group});
        }
  return out;
}

AtomSystem build_sphere(double radius, double a, double mass, RadiusRange range) {
  if (!(a > 0.0)) throw Error("lattice constant must be positive");
  if (radius < 0.5 * a)
    throw Error(fmt::format("sphere radius {:.4g} A is below half a lattice constant ({:.4g} A)", radius, 0.5 * a));
  if (radius < range.min || radius > range.max)
    throw BoundsError(fmt::format("sphere radius {:.4g} A outside [{:.4g}, {:.4g}] A", radius, range.min, range.max));

  const int m = static_cast<int>(std::ceil(radius / a)) + 1;
  const double r2 = radius * radius + kEdgeTol;
  AtomSystem out;
  std::int64_t id = 1;
  for (int iz = -m; iz <= m; ++iz)
    for (int iy = -m; iy <= m; ++iy)
      for (int ix = -m; ix <= m; ++ix)
        for (const auto& b : kFccBasis) {
          const Vec3 p{(ix + b[0]) * a, (iy + b[1]) * a, (iz + b[2]) * a};
          if (dot(p, p) <= r2) out.add({id++, p, {}, mass, p, Group::Particle});
        }
  out.box.lengths = {2.0 * radius + a, 2.0 * radius + a, 2.0 * radius + a};
  out.box.boundary = {Boundary::Open, Boundary::Open, Boundary::Open};
  return out;
}

Vec3 impact_velocity(const DesignPoint& d) {
  const double t = d.theta * units::kPi / 180.0;
  return {d.v * std::sin(t), 0.0, -d.v * std::cos(t)};
}

double substrate_top(const AtomSystem& s) {
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.groups[i] != Group::Particle) top = std::max(top, s.reference_positions[i][2]);
  return top;
}

AtomSystem assemble_scene(const DesignPoint& design, const SceneConfig& c, double mass) {
  const double a = c.lattice_constant;
  if (!(c.standoff > 0.0)) throw Error("stand-off distance must be positive");
  if (c.fixed_layers < 0) throw Error("fixed layer count must be non-negative");

  Vec3 lengths = c.substrate_lengths;
  for (int k = 0; k < 2; ++k) lengths[k] = std::max(1.0, std::floor(lengths[k] / a + kEdgeTol)) * a;
  AtomSystem scene = build_fcc_region(lengths, a, Group::Substrate, mass);
  const double wall_z = c.fixed_layers * 0.5 * a - 1e-6;
  for (std::size_t i = 0; i < scene.size(); ++i)
    if (scene.reference_positions[i][2] < wall_z) scene.groups[i] = Group::FixedWall;
  const double top = substrate_top(scene);

  AtomSystem particle = build_sphere(design.r, a, mass, c.radius_range);
  double low = std::numeric_limits<double>::infinity();
  for (const auto& p : particle.positions) low = std::min(low, p[2]);
  particle.translate({0.5 * lengths[0], 0.5 * lengths[1], top + c.standoff - low});
  const Vec3 vel = impact_velocity(design);
  for (auto& v : particle.velocities) v = vel;

  scene.box.lengths = {lengths[0], lengths[1], top + c.standoff + 2.0 * design.r + c.headroom};
  scene.box.boundary = {Boundary::Periodic, Boundary::Periodic, Boundary::Open};

  const double nn = a / std::sqrt(2.0);
  for (const auto& p : particle.positions)
    for (const auto& q : scene.positions) {
      const Vec3 d = scene.box.minimum_image(p - q);
      if (dot(d, d) < 0.81 * nn * nn)
        throw Error(fmt::format("particle overlaps the substrate (stand-off {:.4g} A)", c.standoff));
    }

  scene.append(particle);
  init_velocities(scene, c.temperature, c.seed);
  return scene;
}

namespace {

std::vector<std::size_t> substrate_indices(const AtomSystem& s) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.groups[i] == Group::Substrate) idx.push_back(i);
  return idx;
}

double kinetic_temperature(const AtomSystem& s, const std::vector<std::size_t>& idx) {
  if (idx.size() < 2) return 0.0;
  double twice_ke = 0.0;
  for (auto i : idx) twice_ke += s.masses[i] * dot(s.velocities[i], s.velocities[i]);
  twice_ke *= units::kMvv2e;
  const double dof = 3.0 * static_cast<double>(idx.size()) - 3.0;
  return twice_ke / (dof * units::kBoltzmann);
}

}  // namespace

double substrate_temperature(const AtomSystem& s) { return kinetic_temperature(s, substrate_indices(s)); }

void init_velocities(AtomSystem& s, double temperature, std::uint64_t seed) {
  if (temperature < 0.0) throw Error("temperature must be non-negative");
  const auto idx = substrate_indices(s);
  for (auto i : idx) s.velocities[i] = {0.0, 0.0, 0.0};
  if (temperature == 0.0 || idx.size() < 2) return;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec3 p{};
  double mtot = 0.0;
  for (auto i : idx) {
    const double sd = std::sqrt(units::kBoltzmann * temperature / (s.masses[i] * units::kMvv2e));
    s.velocities[i] = {sd * normal(rng), sd * normal(rng), sd * normal(rng)};
    p = p + s.masses[i] * s.velocities[i];
    mtot += s.masses[i];
  }
  const Vec3 drift = (1.0 / mtot) * p;
  for (auto i : idx) s.velocities[i] = s.velocities[i] - drift;

  const double scale = std::sqrt(temperature / kinetic_temperature(s, idx));
  for (auto i : idx) s.velocities[i] = scale * s.velocities[i];
}

}  // namespace coldloop::md
