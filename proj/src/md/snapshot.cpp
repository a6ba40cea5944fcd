#include "coldloop/md/snapshot.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace coldloop::md {

Snapshot make_snapshot(const AtomSystem& s, const std::vector<StressTensor>& stress, double time) {
  Snapshot snap;
  snap.time = time;
  snap.box = s.box.lengths;
  snap.atoms.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    snap.atoms.push_back({s.ids[i], s.groups[i], s.positions[i], stress.empty() ? 0.0 : von_mises(stress[i])});
  std::sort(snap.atoms.begin(), snap.atoms.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return snap;
}

void write_dump(std::ostream& out, const Snapshot& s) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "TIME {:.6f}\nNATOMS {}\nBOX {:.6f} {:.6f} {:.6f}\n", s.time, s.atoms.size(),
                 s.box[0], s.box[1], s.box[2]);
  for (const auto& a : s.atoms)
    fmt::format_to(std::back_inserter(buf), "{} {} {:.6f} {:.6f} {:.6f} {:.6e}\n", a.id, static_cast<int>(a.group),
                   a.position[0], a.position[1], a.position[2], a.von_mises);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

namespace {

std::istringstream expect(std::istream& in, const std::string& key, const std::string& source, int& line) {
  std::string text;
  ++line;
  if (!std::getline(in, text)) throw ParseError(source, line, "missing " + key + " header");
  std::istringstream ls(text);
  std::string word;
  ls >> word;
  if (word != key) throw ParseError(source, line, "expected " + key + " header, found '" + word + "'");
  return ls;
}

}  // namespace

Snapshot read_dump(std::istream& in, const std::string& source) {
  Snapshot s;
  int line = 0;
  std::size_t n = 0;
  if (!(expect(in, "TIME", source, line) >> s.time)) throw ParseError(source, line, "bad TIME value");
  if (!(expect(in, "NATOMS", source, line) >> n)) throw ParseError(source, line, "bad NATOMS value");
  {
    auto ls = expect(in, "BOX", source, line);
    if (!(ls >> s.box[0] >> s.box[1] >> s.box[2])) throw ParseError(source, line, "bad BOX values");
  }
  s.atoms.reserve(n);
  std::string text;
  for (std::size_t k = 0; k < n; ++k) {
    ++line;
    if (!std::getline(in, text)) throw ParseError(source, line, fmt::format("expected {} atom lines, found {}", n, k));
    std::istringstream ls(text);
    SnapshotAtom a;
    int g = -1;
    if (!(ls >> a.id >> g >> a.position[0] >> a.position[1] >> a.position[2] >> a.von_mises) || g < 0 || g > 2)
      throw ParseError(source, line, "malformed atom line");
    a.group = static_cast<Group>(g);
    if (!s.atoms.empty() && a.id <= s.atoms.back().id) throw ParseError(source, line, "atoms not sorted by id");
    s.atoms.push_back(a);
  }
  s.pre_impact = s.time == 0.0;
  return s;
}

Snapshot read_dump_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dump " + path);
  return read_dump(in, path);
}

void write_dump_file(const std::string& path, const Snapshot& snapshot) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write dump " + path);
  write_dump(out, snapshot);
}

}  // namespace coldloop::md
