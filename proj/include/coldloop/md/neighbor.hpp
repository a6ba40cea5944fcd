#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "coldloop/md/system.hpp"

namespace coldloop::md {

/// Half Verlet list (pairs i < j) built from a cell grid with cells no
/// smaller than cutoff + skin. Neighbours of each atom are sorted by index,
/// so every traversal visits pairs in the same order.
class NeighborList {
 public:
  NeighborList(double cutoff, double skin);

  void build(const AtomSystem& system);
  /// True once some atom has moved more than skin/2 since the last build.
  bool needs_rebuild(const AtomSystem& system) const;
  void update(const AtomSystem& system) {
    if (needs_rebuild(system)) build(system);
  }

  std::span<const std::uint32_t> neighbors(std::size_t i) const {
    return {list_.data() + offsets_[i], list_.data() + offsets_[i + 1]};
  }

  double cutoff() const { return cutoff_; }
  double skin() const { return skin_; }
  std::size_t build_count() const { return builds_; }

 private:
  double cutoff_, skin_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> list_;
  std::vector<Vec3> anchor_;  // positions at last build
  Vec3 anchor_box_{};
  std::size_t builds_ = 0;
};

}  // namespace coldloop::md
