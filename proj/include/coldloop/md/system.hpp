#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "coldloop/common.hpp"

namespace coldloop::md {

enum class Group : std::uint8_t { Substrate = 0, Particle = 1, FixedWall = 2 };

std::string_view group_name(Group g);

enum class Boundary : std::uint8_t { Periodic, Open };

struct SimulationBox {
  Vec3 lengths{1.0, 1.0, 1.0};
  std::array<Boundary, 3> boundary{Boundary::Periodic, Boundary::Periodic, Boundary::Open};

  void validate() const;

  /// Minimum-image separation; only Periodic axes are folded.
  Vec3 minimum_image(Vec3 d) const {
    for (int k = 0; k < 3; ++k) {
      if (boundary[k] != Boundary::Periodic) continue;
      const double l = lengths[k];
      if (d[k] > 0.5 * l) {
        d[k] -= l;
        if (d[k] > 0.5 * l) d[k] -= l * std::round(d[k] / l);
      } else if (d[k] < -0.5 * l) {
        d[k] += l;
        if (d[k] < -0.5 * l) d[k] -= l * std::round(d[k] / l);
      }
    }
    return d;
  }

  /// Map a position into [0, L) on Periodic axes.
  void wrap(Vec3& x) const {
    for (int k = 0; k < 3; ++k)
      if (boundary[k] == Boundary::Periodic) {
        x[k] -= lengths[k] * std::floor(x[k] / lengths[k]);
        if (x[k] >= lengths[k]) x[k] = 0.0;
      }
  }

  double volume() const { return lengths[0] * lengths[1] * lengths[2]; }
};

/// One atom, used when building or inspecting a system.
struct Atom {
  std::int64_t id = 0;
  Vec3 position{};
  Vec3 velocity{};
  double mass = 0.0;
  Vec3 reference_position{};
  Group group = Group::Substrate;
};

/// Structure-of-arrays atom store. Index order is id order once built by
/// the scene builder; ids are unique.
class AtomSystem {
 public:
  SimulationBox box;

  std::vector<std::int64_t> ids;
  std::vector<Vec3> positions;
  std::vector<Vec3> velocities;
  std::vector<double> masses;
  std::vector<Vec3> reference_positions;
  std::vector<Group> groups;

  std::size_t size() const { return ids.size(); }
  bool empty() const { return ids.empty(); }

  void add(const Atom& a);
  Atom atom(std::size_t i) const;

  /// Append all atoms of `other`, renumbering ids to follow the current maximum.
  void append(const AtomSystem& other);
  /// Translate positions and reference positions.
  void translate(const Vec3& shift);
  /// Reassign ids 1..N in current index order.
  void renumber();
  /// Throws if ids repeat.
  void check_unique_ids() const;

  /// Displacement from the reference position, u_i = x_i - R_i (minimum image
  /// on periodic axes, so wrapping does not show up as a jump).
  Vec3 displacement(std::size_t i) const { return box.minimum_image(positions[i] - reference_positions[i]); }

  double kinetic_energy() const;
  Vec3 momentum() const;
};

}  // namespace coldloop::md
