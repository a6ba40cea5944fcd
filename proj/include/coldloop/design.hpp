#pragma once

#include <array>

namespace coldloop {

/// Impact conditions: speed (A/ps, 1 A/ps = 100 m/s), particle radius (A)
/// and impact angle from the surface normal (degrees).
struct DesignPoint {
  double v = 8.0;
  double r = 15.0;
  double theta = 0.0;

  std::array<double, 3> to_array() const { return {v, r, theta}; }
  static DesignPoint from_array(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }
  bool operator==(const DesignPoint&) const = default;
};

/// Admissible box for DesignPoint.
struct DesignBounds {
  DesignPoint lower{3.0, 10.0, 0.0};
  DesignPoint upper{12.0, 20.0, 30.0};

  bool contains(const DesignPoint& d) const {
    return d.v >= lower.v && d.v <= upper.v && d.r >= lower.r && d.r <= upper.r && d.theta >= lower.theta &&
           d.theta <= upper.theta;
  }
};

}  // namespace coldloop
