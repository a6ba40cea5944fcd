#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace coldloop {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file (potential, dump, config). Carries the 1-based line.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, int line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// A design or argument outside its admissible box.
class BoundsError : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown during a simulation or fit.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Metal units: Angstrom, picosecond, eV, amu, Kelvin.
namespace units {
inline constexpr double kBoltzmann = 8.617333262e-5;  // eV/K
// amu * A^2 / ps^2 expressed in eV
inline constexpr double kMvv2e = 1.66053906660e-27 * 1e-20 / 1e-24 / 1.602176634e-19;
// eV / (A * amu) expressed in A / ps^2
inline constexpr double kForceToAccel = 1.0 / kMvv2e;
inline constexpr double kPi = 3.14159265358979323846;
}  // namespace units

}  // namespace coldloop
