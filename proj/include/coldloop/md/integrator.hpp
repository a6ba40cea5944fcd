#pragma once

#include <vector>

#include "coldloop/md/forces.hpp"

namespace coldloop::md {

/// Advance one Velocity-Verlet step. `forces` must hold the forces of the
/// current configuration on entry and holds the new ones on exit.
/// FixedWall atoms keep their position and a zero velocity.
/// Returns the potential energy at the new configuration.
double step_velocity_verlet(AtomSystem& system, ForceModel& model, std::vector<Vec3>& forces, double dt);

/// Owns the force state between steps.
class VelocityVerlet {
 public:
  VelocityVerlet(AtomSystem& system, ForceModel& model);

  void step(double dt) { potential_ = step_velocity_verlet(system_, model_, forces_, dt); }
  /// Recompute forces after the system was modified from outside.
  void refresh() { potential_ = model_.compute(system_, forces_); }

  double potential_energy() const { return potential_; }
  double kinetic_energy() const { return system_.kinetic_energy(); }
  double total_energy() const { return potential_ + kinetic_energy(); }
  const std::vector<Vec3>& forces() const { return forces_; }

 private:
  AtomSystem& system_;
  ForceModel& model_;
  std::vector<Vec3> forces_;
  double potential_ = 0.0;
};

}  // namespace coldloop::md
