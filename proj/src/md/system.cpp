#include "coldloop/md/system.hpp"

#include <algorithm>
#include <unordered_set>

namespace coldloop::md {

std::string_view group_name(Group g) {
  switch (g) {
    case Group::Substrate: return "substrate";
    case Group::Particle: return "particle";
    case Group::FixedWall: return "wall";
  }
  return "unknown";
}

void SimulationBox::validate() const {
  for (double l : lengths)
    if (!(l > 0.0)) throw Error("simulation box lengths must be strictly positive");
}

void AtomSystem::add(const Atom& a) {
  ids.push_back(a.id);
  positions.push_back(a.position);
  velocities.push_back(a.velocity);
  masses.push_back(a.mass);
  reference_positions.push_back(a.reference_position);
  groups.push_back(a.group);
}

Atom AtomSystem::atom(std::size_t i) const {
  return {ids[i], positions[i], velocities[i], masses[i], reference_positions[i], groups[i]};
}

void AtomSystem::append(const AtomSystem& other) {
  std::int64_t next = ids.empty() ? 1 : *std::max_element(ids.begin(), ids.end()) + 1;
  for (std::size_t i = 0; i < other.size(); ++i) {
    Atom a = other.atom(i);
    a.id = next++;
    add(a);
  }
}

void AtomSystem::translate(const Vec3& shift) {
  for (auto& p : positions) p = p + shift;
  for (auto& p : reference_positions) p = p + shift;
}

void AtomSystem::renumber() {
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<std::int64_t>(i) + 1;
}

void AtomSystem::check_unique_ids() const {
  std::unordered_set<std::int64_t> seen(ids.begin(), ids.end());
  if (seen.size() != ids.size()) throw Error("atom ids are not unique");
}

double AtomSystem::kinetic_energy() const {
  double ke = 0.0;
  for (std::size_t i = 0; i < size(); ++i) ke += 0.5 * masses[i] * dot(velocities[i], velocities[i]);
  return ke * units::kMvv2e;
}

Vec3 AtomSystem::momentum() const {
  Vec3 p{};
  for (std::size_t i = 0; i < size(); ++i) p = p + masses[i] * velocities[i];
  return p;
}

}  // namespace coldloop::md
