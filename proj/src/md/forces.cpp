#include "coldloop/md/forces.hpp"

#include <fmt/format.h>

namespace coldloop::md {

double von_mises(const StressTensor& s) {
  const double a = s.xx - s.yy, b = s.yy - s.zz, c = s.zz - s.xx;
  const double shear = s.xy * s.xy + s.yz * s.yz + s.zx * s.zx;
  return std::sqrt(a * a + b * b + c * c + 6.0 * shear) / std::sqrt(2.0);
}

EAMForceField::EAMForceField(const EAMPotential& potential, double skin)
    : potential_(&potential), list_(potential.cutoff(), skin) {}

double EAMForceField::compute(const AtomSystem& s, std::vector<Vec3>& forces) {
  const std::size_t n = s.size();
  const EAMPotential& pot = *potential_;
  const double cut2 = pot.cutoff() * pot.cutoff();
  const double rmin = pot.min_distance();

  list_.update(s);
  rho_.assign(n, 0.0);
  dF_.assign(n, 0.0);
  pairs_.clear();

  double pair_energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 xi = s.positions[i];
    for (std::uint32_t j : list_.neighbors(i)) {
      const Vec3 d = s.box.minimum_image(s.positions[j] - xi);
      const double r2 = dot(d, d);
      if (r2 >= cut2) continue;
      const double r = std::sqrt(r2);
      if (r < rmin)
        throw NumericalError(fmt::format("atoms {} and {} are {:.4g} A apart, below the tabulated minimum {:.4g} A",
                                         s.ids[i], s.ids[j], r, rmin));
      double rho, drho, phi, dphi;
      pot.pair_terms(r, rho, drho, phi, dphi);
      rho_[i] += rho;
      rho_[j] += rho;
      pair_energy += phi;
      pairs_.push_back({static_cast<std::uint32_t>(i), j, d, 1.0 / r, drho, dphi});
    }
  }

  double embed_energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double f, df;
    pot.embed(rho_[i], f, df);
    embed_energy += f;
    dF_[i] = df;
  }

  forces.assign(n, Vec3{});
  for (const PairTerm& p : pairs_) {
    // dU/dr for this pair; the force on i points along +d when positive.
    const double du = p.dphi + (dF_[p.i] + dF_[p.j]) * p.drho;
    const double scale = du * p.inv_r;
    const Vec3 f = scale * p.d;
    auto& fi = forces[p.i];
    auto& fj = forces[p.j];
    fi[0] += f[0]; fi[1] += f[1]; fi[2] += f[2];
    fj[0] -= f[0]; fj[1] -= f[1]; fj[2] -= f[2];
  }
  return embed_energy + pair_energy;
}

std::vector<StressTensor> EAMForceField::virial(const AtomSystem& s) const {
  std::vector<StressTensor> out(s.size());
  for (const PairTerm& p : pairs_) {
    const double du = p.dphi + (dF_[p.i] + dF_[p.j]) * p.drho;
    // 1/2 d (x) f_ij with f_ij = du/r * d; identical share for j.
    const double h = 0.5 * du * p.inv_r;
    StressTensor t{h * p.d[0] * p.d[0], h * p.d[1] * p.d[1], h * p.d[2] * p.d[2],
                   h * p.d[0] * p.d[1], h * p.d[1] * p.d[2], h * p.d[2] * p.d[0]};
    out[p.i] += t;
    out[p.j] += t;
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double m = s.masses[i] * units::kMvv2e;
    const Vec3& v = s.velocities[i];
    StressTensor& t = out[i];
    t.xx -= m * v[0] * v[0];
    t.yy -= m * v[1] * v[1];
    t.zz -= m * v[2] * v[2];
    t.xy -= m * v[0] * v[1];
    t.yz -= m * v[1] * v[2];
    t.zx -= m * v[2] * v[0];
  }
  return out;
}

ForceResult compute_forces(const AtomSystem& system, const EAMPotential& potential) {
  EAMForceField field(potential, 0.0);
  ForceResult out;
  out.potential_energy = field.compute(system, out.forces);
  out.densities = field.densities();
  return out;
}

std::vector<StressTensor> virial_stress(const AtomSystem& system, const EAMPotential& potential) {
  EAMForceField field(potential, 0.0);
  std::vector<Vec3> forces;
  field.compute(system, forces);
  return field.virial(system);
}

StressTensor system_stress(const std::vector<StressTensor>& per_atom, double volume) {
  StressTensor sum;
  for (const auto& t : per_atom) sum += t;
  const double k = 1.0 / volume;
  return {sum.xx * k, sum.yy * k, sum.zz * k, sum.xy * k, sum.yz * k, sum.zx * k};
}

}  // namespace coldloop::md
