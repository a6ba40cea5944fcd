#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "coldloop/md/spline.hpp"

namespace coldloop::md {

/// Single-element tabulated EAM potential.
///
/// F(rho) is sampled at rho = k * d_rho; rho(r) and r*phi(r) are sampled at
/// r = k * d_r. Every table is interpolated
/// with a natural cubic spline; pair and density terms vanish for r >= cutoff.
class EAMPotential {
 public:
  struct Header {
    std::string comment;
    int atomic_number = 0;
    double atomic_mass = 0.0;       // amu
    double lattice_constant = 0.0;  // A
    std::string lattice = "FCC";
  };

  EAMPotential() = default;
  EAMPotential(Header header, double d_rho, std::vector<double> embedding, double d_r,
               std::vector<double> density, std::vector<double> r_phi, double cutoff);

  const Header& header() const { return header_; }
  double atomic_mass() const { return header_.atomic_mass; }
  double lattice_constant() const { return header_.lattice_constant; }
  double cutoff() const { return cutoff_; }
  double d_rho() const { return d_rho_; }
  double d_r() const { return d_r_; }
  /// Smallest pair distance the tables resolve; closer pairs are an overlap.
  double min_distance() const { return d_r_; }

  const std::vector<double>& embedding_table() const { return embedding_; }
  const std::vector<double>& density_table() const { return density_; }
  const std::vector<double>& r_phi_table() const { return r_phi_; }

  void embed(double rho, double& f, double& df) const { embedding_spline_.evaluate(rho, f, df); }
  double embed(double rho) const { return embedding_spline_.value(rho); }

  /// Density contribution rho(r) and pair energy phi(r) with their r-derivatives.
  /// Caller guarantees min_distance() <= r < cutoff().
  void pair_terms(double r, double& rho, double& drho, double& phi, double& dphi) const {
    // Density and r*phi share the r grid; one lookup serves both.
    const double u = r * inv_d_r_;
    const auto k = static_cast<std::size_t>(u);
    const double t = u - static_cast<double>(k);
    const auto& c = pair_coeffs_[k];
    rho = c[0] + t * (c[1] + t * (c[2] + t * c[3]));
    drho = (c[1] + t * (2.0 * c[2] + t * 3.0 * c[3])) * inv_d_r_;
    const double rp = c[4] + t * (c[5] + t * (c[6] + t * c[7]));
    const double drp = (c[5] + t * (2.0 * c[6] + t * 3.0 * c[7])) * inv_d_r_;
    const double inv_r = 1.0 / r;
    phi = rp * inv_r;
    dphi = (drp - phi) * inv_r;
  }
  double density(double r) const { return r < cutoff_ ? density_spline_.value(r) : 0.0; }
  double pair(double r) const { return r < cutoff_ ? r_phi_spline_.value(r) / r : 0.0; }

 private:
  Header header_;
  double d_rho_ = 0.0, d_r_ = 0.0, cutoff_ = 0.0;
  std::vector<double> embedding_, density_, r_phi_;
  UniformSpline embedding_spline_, density_spline_, r_phi_spline_;
  double inv_d_r_ = 0.0;
  std::vector<std::array<double, 8>> pair_coeffs_;
};

/// Hartree * Bohr in eV * A, the funcfl conversion r*phi = kZ2ToRPhi * Z(r)^2.
inline constexpr double kZ2ToRPhi = 27.2 * 0.529;

/// Parse a single-element tabulated EAM file. Two layouts are recognised:
///  - funcfl: comment; "Z mass a lattice"; "Nrho drho Nr dr cutoff"; F, Z(r), rho(r)
///  - setfl:  three comments; "1 El"; "Nrho drho Nr dr cutoff"; "Z mass a lattice";
///            F, rho(r), r*phi(r)
/// The layout is chosen from line 4 (an element count followed by names means setfl).
/// Errors name the offending line.
EAMPotential load_eam(std::istream& in, const std::string& source = "<eam>");
EAMPotential load_eam_file(const std::string& path);

/// Write in funcfl layout. Requires r*phi >= 0 everywhere (Z = sqrt(r phi / kZ2ToRPhi)).
void write_funcfl(std::ostream& out, const EAMPotential& potential);
/// Write in single-element setfl layout (signed r*phi).
void write_setfl(std::ostream& out, const EAMPotential& potential, const std::string& element = "Cu");

/// Analytic many-neighbour EAM for Cu. With x = r / r_e:
///   phi(r) = A e^{-alpha(x-1)} / (1 + (x-kappa)^20) - B e^{-beta(x-1)} / (1 + (x-lambda)^20)
///   f(r)   = f_e e^{-beta(x-1)} / (1 + (x-lambda)^20)
///   F(rho) = sum_i Fn_i (rho/rho_n - 1)^i          rho < 0.85 rho_e = rho_n
///            sum_i F_i (rho/rho_e - 1)^i           rho < 1.15 rho_e
///            F_e (1 - ln t) t, t = (rho/rho_s)^eta  otherwise
/// phi and f are multiplied by a quintic taper between taper_start and cutoff.
/// FCC Cu: a0 = 3.615 A, E_c = 3.54 eV, B = 138 GPa, intrinsic stacking fault
/// energy about 50 mJ/m^2 with the default taper.
struct AnalyticCopperParams {
  double r_e = 2.556162, f_e = 1.554485, rho_e = 21.175871, rho_s = 21.175395;
  double alpha = 8.127620, beta = 4.334731, A = 0.396620, B = 0.548085;
  double kappa = 0.308782, lambda = 0.756515;
  std::array<double, 4> Fn{-2.170269, -0.263788, 1.088878, -0.817603};
  std::array<double, 4> F{-2.19, 0.0, 0.561830, -2.100595};
  double eta = 0.310490, F_e = -2.186568;
  double cohesive_energy = 3.54;    // eV, documented in the header comment
  double lattice_constant = 3.615;  // A
  double taper_start = 4.6;         // A
  double cutoff = 5.0;              // A
  double mass = 63.546;             // amu
  int n_rho = 2000;
  double rho_max_ratio = 4.0;       // rho table extends to rho_max_ratio * rho_e
  int n_r = 2000;
};

EAMPotential analytic_copper_potential(const AnalyticCopperParams& params = {});

}  // namespace coldloop::md
