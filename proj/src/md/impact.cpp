#include "coldloop/md/impact.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "coldloop/md/integrator.hpp"

namespace coldloop::md {

double impact_end_time(const DesignPoint& d, const ImpactConfig& c) {
  const double vz = d.v * std::cos(d.theta * units::kPi / 180.0);
  if (!(vz > 0.0)) throw Error("impact needs a positive normal velocity");
  return c.scene.standoff / vz + c.post_contact_time;
}

namespace {

long steps_for(double time, double dt) { return static_cast<long>(std::floor(time / dt + 1e-9)); }

// Lowest particle z minus highest substrate z.
double particle_gap(const AtomSystem& s) {
  double low = std::numeric_limits<double>::infinity(), high = -low;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double z = s.positions[i][2];
    if (s.groups[i] == Group::Particle) low = std::min(low, z);
    else high = std::max(high, z);
  }
  return low - high;
}

}  // namespace

ImpactRun run_impact(const DesignPoint& design, const ImpactConfig& c, const EAMPotential& potential) {
  if (!(c.dt > 0.0)) throw Error("time step must be positive");
  const long per_frame = std::lround(c.snapshot_interval / c.dt);
  if (per_frame < 1 || std::abs(per_frame * c.dt - c.snapshot_interval) > 1e-9 * c.snapshot_interval)
    throw Error("snapshot interval must be a whole number of time steps");

  AtomSystem scene = assemble_scene(design, c.scene, potential.atomic_mass());

  // Substrate settles on its own before the particle is released.
  const long settle = steps_for(c.equilibration_time, c.dt);
  if (settle > 0) {
    AtomSystem substrate;
    substrate.box = scene.box;
    for (std::size_t i = 0; i < scene.size(); ++i)
      if (scene.groups[i] != Group::Particle) substrate.add(scene.atom(i));
    EAMForceField field(potential, c.skin);
    VelocityVerlet vv(substrate, field);
    for (long k = 0; k < settle; ++k) vv.step(c.dt);
    for (std::size_t i = 0; i < substrate.size(); ++i) {
      scene.positions[i] = substrate.positions[i];
      scene.velocities[i] = substrate.velocities[i];
    }
  }

  ImpactRun run;
  run.t_end = impact_end_time(design, c);
  const long total = steps_for(run.t_end, c.dt);

  EAMForceField field(potential, c.skin);
  VelocityVerlet vv(scene, field);
  const double ke0 = vv.kinetic_energy();
  run.initial_energy = vv.total_energy();
  const double bound = c.divergence_factor * ke0;

  auto capture = [&](long step) {
    const std::vector<StressTensor> stress = c.record_stress ? field.virial(scene) : std::vector<StressTensor>{};
    Snapshot snap = make_snapshot(scene, stress, static_cast<double>(step) * c.dt);
    snap.pre_impact = step == 0;
    run.frames.push_back(std::move(snap));
  };

  capture(0);
  for (long step = 1; step <= total; ++step) {
    vv.step(c.dt);
    if (run.contact_time < 0.0 && particle_gap(scene) < potential.cutoff())
      run.contact_time = static_cast<double>(step) * c.dt;
    if (step % per_frame == 0) {
      const double e = vv.total_energy();
      if (!std::isfinite(e) || std::abs(e - run.initial_energy) > bound)
        throw NumericalError(fmt::format("energy diverged at t = {:.3f} ps: E = {:.6g} eV, E0 = {:.6g} eV, KE0 = {:.6g} eV",
                                         static_cast<double>(step) * c.dt, e, run.initial_energy, ke0));
      capture(step);
    }
  }
  run.final_energy = vv.total_energy();
  run.steps = static_cast<std::size_t>(total);
  return run;
}

}  // namespace coldloop::md
