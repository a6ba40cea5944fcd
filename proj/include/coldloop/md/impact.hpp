#pragma once

#include <functional>
#include <vector>

#include "coldloop/md/eam.hpp"
#include "coldloop/md/scene.hpp"
#include "coldloop/md/snapshot.hpp"

namespace coldloop::md {

struct ImpactConfig {
  SceneConfig scene{};
  double dt = 0.001;                // ps
  double snapshot_interval = 0.5;   // ps
  double post_contact_time = 10.0;  // ps simulated after the ballistic arrival time
  double equilibration_time = 1.0;  // ps of substrate-only NVE before release
  double skin = 0.8;                // A
  double divergence_factor = 10.0;  // abort when |E - E0| exceeds this times the initial kinetic energy
  bool record_stress = true;        // per-atom Von Mises in every frame
};

struct ImpactRun {
  std::vector<Snapshot> frames;  // frames[0] is the pre-impact frame at t = 0
  double t_end = 0.0;
  double contact_time = -1.0;  // first time the particle came within the cutoff of the surface
  double initial_energy = 0.0;
  double final_energy = 0.0;
  std::size_t steps = 0;
};

/// Simulated time after release: stand-off / (v cos theta) + post_contact_time.
double impact_end_time(const DesignPoint& design, const ImpactConfig& config);

/// Assemble, settle the substrate, release the particle and integrate until
/// impact_end_time. Frames every snapshot_interval starting at t = 0.
/// Throws NumericalError when the total energy drifts beyond the divergence bound.
ImpactRun run_impact(const DesignPoint& design, const ImpactConfig& config, const EAMPotential& potential);

}  // namespace coldloop::md
