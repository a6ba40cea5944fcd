#include "coldloop/md/integrator.hpp"

namespace coldloop::md {

namespace {

void half_kick(AtomSystem& s, const std::vector<Vec3>& forces, double dt) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.groups[i] == Group::FixedWall) {
      s.velocities[i] = {0.0, 0.0, 0.0};
      continue;
    }
    const double k = 0.5 * dt * units::kForceToAccel / s.masses[i];
    auto& v = s.velocities[i];
    v[0] += k * forces[i][0];
    v[1] += k * forces[i][1];
    v[2] += k * forces[i][2];
  }
}

}  // namespace

double step_velocity_verlet(AtomSystem& s, ForceModel& model, std::vector<Vec3>& forces, double dt) {
  if (!(dt > 0.0)) throw Error("time step must be positive");
  half_kick(s, forces, dt);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.groups[i] == Group::FixedWall) continue;
    auto& x = s.positions[i];
    const auto& v = s.velocities[i];
    x[0] += dt * v[0];
    x[1] += dt * v[1];
    x[2] += dt * v[2];
    s.box.wrap(x);
  }
  const double pe = model.compute(s, forces);
  half_kick(s, forces, dt);
  return pe;
}

VelocityVerlet::VelocityVerlet(AtomSystem& system, ForceModel& model) : system_(system), model_(model) { refresh(); }

}  // namespace coldloop::md
