#pragma once

#include <cstdint>

#include "coldloop/design.hpp"
#include "coldloop/md/system.hpp"

namespace coldloop::md {

/// FCC sites of cells whose corners sit on integer multiples of the lattice
/// constant, keeping sites inside [0, L) on every axis. Reference positions
/// equal positions; ids run 1..N in (z, y, x) order.
AtomSystem build_fcc_region(const Vec3& lengths, double lattice_constant, Group group, double mass = 1.0);

struct RadiusRange {
  double min = 10.0;
  double max = 20.0;
};

/// FCC sites within `radius` of a lattice site at the origin, all tagged Particle.
AtomSystem build_sphere(double radius, double lattice_constant, double mass = 1.0, RadiusRange range = {});

struct SceneConfig {
  Vec3 substrate_lengths{80.0, 80.0, 30.0};
  double lattice_constant = 3.61;
  double standoff = 40.0;     // substrate top surface to lowest particle atom
  int fixed_layers = 2;       // bottom atomic layers held fixed
  double temperature = 298.0; // K
  double headroom = 10.0;     // empty space above the particle
  RadiusRange radius_range{};
  std::uint64_t seed = 1;
};

/// Substrate at the bottom of the box (periodic in x, y; open in z) with
/// its lateral size rounded down to whole cells, particle centred above it.
/// Substrate atoms come first in index order, then particle atoms.
AtomSystem assemble_scene(const DesignPoint& design, const SceneConfig& config, double mass);

/// Maxwell-Boltzmann velocities for Substrate-group atoms, net momentum
/// removed, rescaled so the kinetic temperature (3N - 3 degrees of freedom)
/// equals `temperature`. Other groups are left untouched.
void init_velocities(AtomSystem& system, double temperature, std::uint64_t seed);

/// Kinetic temperature of the Substrate group with 3N - 3 degrees of freedom.
double substrate_temperature(const AtomSystem& system);

/// Highest reference z among substrate and wall atoms.
double substrate_top(const AtomSystem& system);

/// Impact velocity (v sin theta, 0, -v cos theta) with theta in degrees.
Vec3 impact_velocity(const DesignPoint& design);

}  // namespace coldloop::md
