#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "coldloop/md/forces.hpp"
#include "coldloop/md/system.hpp"

namespace coldloop::md {

struct SnapshotAtom {
  std::int64_t id = 0;
  Group group = Group::Substrate;
  Vec3 position{};
  double von_mises = 0.0;
};

/// One frame of a run: atoms sorted by id.
struct Snapshot {
  double time = 0.0;  // ps
  Vec3 box{};
  bool pre_impact = false;
  std::vector<SnapshotAtom> atoms;
};

/// Capture the current state. `stress` may be empty (Von Mises left at 0).
Snapshot make_snapshot(const AtomSystem& system, const std::vector<StressTensor>& stress, double time);

/// Plain-text dump:
///   TIME <ps>
///   NATOMS <n>
///   BOX <lx> <ly> <lz>
///   id group x y z vm_stress     (one line per atom, sorted by id)
/// Group codes: 0 substrate, 1 particle, 2 wall.
void write_dump(std::ostream& out, const Snapshot& snapshot);
Snapshot read_dump(std::istream& in, const std::string& source = "<dump>");

/// A frame at t = 0 is the pre-impact frame.
Snapshot read_dump_file(const std::string& path);
void write_dump_file(const std::string& path, const Snapshot& snapshot);

}  // namespace coldloop::md
