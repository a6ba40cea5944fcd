#pragma once

#include <memory>
#include <vector>

#include "coldloop/md/eam.hpp"
#include "coldloop/md/neighbor.hpp"
#include "coldloop/md/system.hpp"

namespace coldloop::md {

/// Anything that can produce forces and a potential energy for a system.
class ForceModel {
 public:
  virtual ~ForceModel() = default;
  /// Resizes and fills `forces` (eV/A); returns the potential energy (eV).
  virtual double compute(const AtomSystem& system, std::vector<Vec3>& forces) = 0;
};

/// Per-atom virial in stress*volume units (eV). Symmetric, six components.
struct StressTensor {
  double xx = 0, yy = 0, zz = 0, xy = 0, yz = 0, zx = 0;

  StressTensor& operator+=(const StressTensor& o) {
    xx += o.xx; yy += o.yy; zz += o.zz; xy += o.xy; yz += o.yz; zx += o.zx;
    return *this;
  }
};

/// Equivalent (Von Mises) stress of a symmetric tensor.
double von_mises(const StressTensor& s);

/// EAM forces over a half neighbour list.
///
/// U = sum_i F(rho_i) + sum_{i<j} phi(r_ij),  rho_i = sum_{j != i} rho(r_ij).
/// Pairs are visited in (i, j) index order, so results are reproducible bit for bit.
class EAMForceField : public ForceModel {
 public:
  explicit EAMForceField(const EAMPotential& potential, double skin = 0.5);

  double compute(const AtomSystem& system, std::vector<Vec3>& forces) override;

  /// Per-atom virial for the configuration of the last compute() call:
  /// s_i = 1/2 sum_j (r_j - r_i) (x) f_ij  -  m_i v_i (x) v_i.
  std::vector<StressTensor> virial(const AtomSystem& system) const;

  const std::vector<double>& densities() const { return rho_; }
  const std::vector<double>& embedding_derivatives() const { return dF_; }
  const NeighborList& neighbor_list() const { return list_; }
  const EAMPotential& potential() const { return *potential_; }

 private:
  struct PairTerm {
    std::uint32_t i, j;
    Vec3 d;  // r_j - r_i (minimum image)
    double inv_r, drho, dphi;
  };

  const EAMPotential* potential_;
  NeighborList list_;
  std::vector<double> rho_, dF_;
  std::vector<PairTerm> pairs_;
};

struct ForceResult {
  std::vector<Vec3> forces;
  double potential_energy = 0.0;
  std::vector<double> densities;
};

/// One-shot force evaluation (builds its own neighbour list).
ForceResult compute_forces(const AtomSystem& system, const EAMPotential& potential);

/// Per-atom virial for the current configuration (one-shot).
std::vector<StressTensor> virial_stress(const AtomSystem& system, const EAMPotential& potential);

/// Sum of per-atom virials divided by the box volume.
StressTensor system_stress(const std::vector<StressTensor>& per_atom, double volume);

}  // namespace coldloop::md
