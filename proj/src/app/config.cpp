#include "coldloop/app/config.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "coldloop/common.hpp"

namespace coldloop::app {

RunConfig RunConfig::full_scale() {
  RunConfig c;
  c.impact.scene.substrate_lengths = {240.0, 240.0, 50.0};
  return c;
}

bool RunConfig::operator==(const RunConfig& o) const { return config_to_string(*this) == config_to_string(o); }

namespace {

struct BadValue {
  std::string expected;
};

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (b != e && *b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e || !std::isfinite(v)) throw BadValue{"a finite number"};
  return v;
}

std::uint64_t parse_uint(const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) throw BadValue{"a non-negative integer"};
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw BadValue{"true or false"};
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
std::vector<T> parse_list(const std::string& s, T (*one)(const std::string&)) {
  std::vector<T> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(one(trim(item)));
  return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += fmt::format("{}{}", i ? ", " : "", v[i]);
  return out;
}

std::string fmt_double(double v) { return fmt::format("{}", v); }

struct Field {
  std::string section, key, doc;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <class Getter>
Field real(std::string s, std::string k, std::string doc, Getter ref) {
  return {std::move(s), std::move(k), std::move(doc),
          [ref](const RunConfig& c) { return fmt_double(ref(const_cast<RunConfig&>(c))); },
          [ref](RunConfig& c, const std::string& v) { ref(c) = parse_double(v); }};
}

template <class Getter>
Field count(std::string s, std::string k, std::string doc, Getter ref) {
  return {std::move(s), std::move(k), std::move(doc),
          [ref](const RunConfig& c) { return fmt::format("{}", ref(const_cast<RunConfig&>(c))); },
          [ref](RunConfig& c, const std::string& v) {
            using T = std::remove_reference_t<decltype(ref(c))>;
            ref(c) = static_cast<T>(parse_uint(v));
          }};
}

template <class Getter>
Field text(std::string s, std::string k, std::string doc, Getter ref, std::vector<std::string> allowed = {}) {
  return {std::move(s), std::move(k), std::move(doc),
          [ref](const RunConfig& c) { return ref(const_cast<RunConfig&>(c)); },
          [ref, allowed](RunConfig& c, const std::string& v) {
            if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), v) == allowed.end())
              throw BadValue{"one of " + join(allowed)};
            ref(c) = v;
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = [] {
    std::vector<Field> v;
    // scene
    v.push_back(real("scene", "substrate_x", "substrate length along x, A (240 at full scale)",
                     [](RunConfig& c) -> double& { return c.impact.scene.substrate_lengths[0]; }));
    v.push_back(real("scene", "substrate_y", "substrate length along y, A (240 at full scale)",
                     [](RunConfig& c) -> double& { return c.impact.scene.substrate_lengths[1]; }));
    v.push_back(real("scene", "substrate_z", "substrate thickness, A (50 at full scale)",
                     [](RunConfig& c) -> double& { return c.impact.scene.substrate_lengths[2]; }));
    v.push_back(real("scene", "lattice_constant", "FCC lattice constant used to build the scene, A",
                     [](RunConfig& c) -> double& { return c.impact.scene.lattice_constant; }));
    v.push_back(real("scene", "standoff", "gap between substrate top and particle bottom, A",
                     [](RunConfig& c) -> double& { return c.impact.scene.standoff; }));
    v.push_back(count("scene", "fixed_layers", "bottom atomic layers held fixed",
                      [](RunConfig& c) -> int& { return c.impact.scene.fixed_layers; }));
    v.push_back(real("scene", "temperature", "substrate temperature, K",
                     [](RunConfig& c) -> double& { return c.impact.scene.temperature; }));
    v.push_back(real("scene", "headroom", "empty space above the particle, A",
                     [](RunConfig& c) -> double& { return c.impact.scene.headroom; }));
    v.push_back(real("scene", "radius_min", "smallest admissible particle radius, A",
                     [](RunConfig& c) -> double& { return c.impact.scene.radius_range.min; }));
    v.push_back(real("scene", "radius_max", "largest admissible particle radius, A",
                     [](RunConfig& c) -> double& { return c.impact.scene.radius_range.max; }));
    // md
    v.push_back(text("md", "potential", "tabulated EAM file (funcfl or setfl); empty for the built-in Cu table",
                     [](RunConfig& c) -> std::string& { return c.potential; }));
    v.push_back(real("md", "dt", "time step, ps", [](RunConfig& c) -> double& { return c.impact.dt; }));
    v.push_back(real("md", "snapshot_interval", "frame cadence, ps",
                     [](RunConfig& c) -> double& { return c.impact.snapshot_interval; }));
    v.push_back(real("md", "post_contact_time", "time simulated after the ballistic arrival, ps",
                     [](RunConfig& c) -> double& { return c.impact.post_contact_time; }));
    v.push_back(real("md", "equilibration_time", "substrate-only settling before release, ps",
                     [](RunConfig& c) -> double& { return c.impact.equilibration_time; }));
    v.push_back(real("md", "skin", "neighbour list skin, A", [](RunConfig& c) -> double& { return c.impact.skin; }));
    v.push_back(real("md", "divergence_factor", "abort when |E - E0| exceeds this times the initial kinetic energy",
                     [](RunConfig& c) -> double& { return c.impact.divergence_factor; }));
    // design
    v.push_back(real("design", "v", "impact speed for simulate, A/ps (1 A/ps = 100 m/s), in [3, 12]",
                     [](RunConfig& c) -> double& { return c.design.v; }));
    v.push_back(real("design", "r", "particle radius for simulate, A, in [10, 20]",
                     [](RunConfig& c) -> double& { return c.design.r; }));
    v.push_back(real("design", "theta", "impact angle from the surface normal for simulate, degrees, in [0, 30]",
                     [](RunConfig& c) -> double& { return c.design.theta; }));
    // imaging
    v.push_back(real("imaging", "pixel_scale", "pixels per A",
                     [](RunConfig& c) -> double& { return c.render.pixel_scale; }));
    v.push_back(real("imaging", "z_min", "render band floor above the substrate top, A",
                     [](RunConfig& c) -> double& { return c.render.z_min; }));
    v.push_back(real("imaging", "z_max", "render band ceiling above the substrate top, A",
                     [](RunConfig& c) -> double& { return c.render.z_max; }));
    v.push_back(real("imaging", "atom_draw_radius", "disc radius per atom, A",
                     [](RunConfig& c) -> double& { return c.render.atom_draw_radius; }));
    v.push_back(count("imaging", "threshold", "binarization threshold, 0..255",
                      [](RunConfig& c) -> int& { return c.pipeline.threshold; }));
    v.push_back(count("imaging", "min_component", "smallest component kept by the denoiser, px",
                      [](RunConfig& c) -> std::size_t& { return c.pipeline.min_component; }));
    v.push_back(real("imaging", "contact_gap", "particle-to-surface distance that marks contact, A",
                     [](RunConfig& c) -> double& { return c.pipeline.contact_gap; }));
    v.push_back(real("imaging", "stress_min", "Von Mises stress * volume at intensity 1, eV",
                     [](RunConfig& c) -> double& { return c.stress_min; }));
    v.push_back(real("imaging", "stress_max", "Von Mises stress * volume at intensity 255, eV",
                     [](RunConfig& c) -> double& { return c.stress_max; }));
    v.push_back({"imaging", "frame_times", "top-view PNG times, ps (comma separated)",
                 [](const RunConfig& c) { return join(c.frame_times); },
                 [](RunConfig& c, const std::string& s) { c.frame_times = parse_list(s, parse_double); }});
    v.push_back({"imaging", "stress_times", "stress PNG times, ps (comma separated)",
                 [](const RunConfig& c) { return join(c.stress_times); },
                 [](RunConfig& c, const std::string& s) { c.stress_times = parse_list(s, parse_double); }});
    // objective
    v.push_back(text("objective", "kind", "simulation, or analytic for the closed-form stand-in",
                     [](RunConfig& c) -> std::string& { return c.objective; }, {"simulation", "analytic"}));
    v.push_back(real("objective", "penalty", "c assigned when no splat is found or a simulation fails",
                     [](RunConfig& c) -> double& { return c.penalty; }));
    v.push_back(count("objective", "replicas", "seeds averaged per design",
                      [](RunConfig& c) -> std::size_t& { return c.replicas; }));
    // optimizer
    v.push_back(text("optimizer", "algorithm", "ego, pso or de",
                     [](RunConfig& c) -> std::string& { return c.algorithm; }, {"ego", "pso", "de"}));
    v.push_back(count("optimizer", "ego_initial", "EGO Latin hypercube size",
                      [](RunConfig& c) -> std::size_t& { return c.ego.n_init; }));
    v.push_back(count("optimizer", "ego_infill", "EGO single-point infill iterations",
                      [](RunConfig& c) -> std::size_t& { return c.ego.n_infill; }));
    v.push_back(count("optimizer", "ego_inner_population", "inner DE population maximizing expected improvement",
                      [](RunConfig& c) -> std::size_t& { return c.ego.inner_population; }));
    v.push_back(count("optimizer", "ego_inner_generations", "inner DE generations",
                      [](RunConfig& c) -> std::size_t& { return c.ego.inner_generations; }));
    v.push_back(count("optimizer", "pso_particles", "PSO swarm size",
                      [](RunConfig& c) -> std::size_t& { return c.pso.particles; }));
    v.push_back(count("optimizer", "pso_generations", "PSO generations, the initial swarm included",
                      [](RunConfig& c) -> std::size_t& { return c.pso.generations; }));
    v.push_back(real("optimizer", "pso_w", "PSO inertia weight", [](RunConfig& c) -> double& { return c.pso.w; }));
    v.push_back(real("optimizer", "pso_c1", "PSO cognitive coefficient", [](RunConfig& c) -> double& { return c.pso.c1; }));
    v.push_back(real("optimizer", "pso_c2", "PSO social coefficient", [](RunConfig& c) -> double& { return c.pso.c2; }));
    v.push_back(count("optimizer", "de_population", "DE population size",
                      [](RunConfig& c) -> std::size_t& { return c.de.population; }));
    v.push_back(count("optimizer", "de_generations", "DE generations, the initial population included",
                      [](RunConfig& c) -> std::size_t& { return c.de.generations; }));
    v.push_back(real("optimizer", "de_F", "DE differential weight", [](RunConfig& c) -> double& { return c.de.F; }));
    v.push_back(real("optimizer", "de_CR", "DE crossover rate", [](RunConfig& c) -> double& { return c.de.CR; }));
    // surrogate
    v.push_back(count("surrogate", "train_samples", "simulated training designs (Latin hypercube)",
                      [](RunConfig& c) -> std::size_t& { return c.train_samples; }));
    v.push_back(count("surrogate", "test_samples", "simulated test designs (Latin hypercube, separate seed)",
                      [](RunConfig& c) -> std::size_t& { return c.test_samples; }));
    v.push_back({"surrogate", "layers", "layer sizes, input first (comma separated)",
                 [](const RunConfig& c) { return join(c.train.layers); },
                 [](RunConfig& c, const std::string& s) {
                   auto l = parse_list<std::uint64_t>(s, parse_uint);
                   c.train.layers.assign(l.begin(), l.end());
                 }});
    v.push_back(count("surrogate", "epochs", "training epochs",
                      [](RunConfig& c) -> std::size_t& { return c.train.epochs; }));
    v.push_back(real("surrogate", "learning_rate", "gradient descent step",
                     [](RunConfig& c) -> double& { return c.train.learning_rate; }));
    v.push_back(real("surrogate", "momentum", "gradient descent momentum",
                     [](RunConfig& c) -> double& { return c.train.momentum; }));
    v.push_back(real("surrogate", "validation_fraction", "share of training samples held out for best-epoch selection",
                     [](RunConfig& c) -> double& { return c.train.validation_fraction; }));
    v.push_back(count("surrogate", "batch_size", "samples per update (1 is online backpropagation)",
                      [](RunConfig& c) -> std::size_t& { return c.train.batch_size; }));
    v.push_back(real("surrogate", "init_scale", "initial weights drawn from U[-init_scale, init_scale]",
                     [](RunConfig& c) -> double& { return c.train.init_scale; }));
    v.push_back({"surrogate", "verify", "re-simulate the surrogate optimum once (+1 t_p)",
                 [](const RunConfig& c) { return std::string(c.verify ? "true" : "false"); },
                 [](RunConfig& c, const std::string& s) { c.verify = parse_bool(s); }});
    // run
    v.push_back(count("run", "seed", "seed for the scene, optimizers and training",
                      [](RunConfig& c) -> std::uint64_t& { return c.seed; }));
    v.push_back(count("run", "workers", "concurrent simulations",
                      [](RunConfig& c) -> std::size_t& { return c.workers; }));
    return v;
  }();
  return f;
}

// Line of each `[section]` and `key =` in the text, for diagnostics.
struct LineIndex {
  std::map<std::string, int> sections;
  std::map<std::pair<std::string, std::string>, int> keys;
};

LineIndex index_lines(const std::string& text) {
  LineIndex idx;
  std::istringstream in(text);
  std::string line, section;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = trim(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      idx.sections.emplace(section, n);
      continue;
    }
    const auto eq = t.find('=');
    if (eq != std::string::npos) idx.keys.emplace(std::make_pair(section, trim(t.substr(0, eq))), n);
  }
  return idx;
}

}  // namespace

std::vector<ConfigKey> config_schema() {
  std::vector<ConfigKey> out;
  for (const auto& f : fields()) out.push_back({f.section, f.key, f.doc});
  return out;
}

void write_config(std::ostream& out, const RunConfig& c, bool with_comments) {
  std::string section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      fmt::print(out, "{}[{}]\n", section.empty() ? "" : "\n", f.section);
      section = f.section;
    }
    if (with_comments) fmt::print(out, "; {}\n", f.doc);
    fmt::print(out, "{} = {}\n", f.key, f.get(c));
  }
}

std::string config_to_string(const RunConfig& c, bool with_comments) {
  std::ostringstream s;
  write_config(s, c, with_comments);
  return s.str();
}

RunConfig read_config(std::istream& in, const std::string& source) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  boost::property_tree::ptree tree;
  try {
    std::istringstream s(text);
    boost::property_tree::ini_parser::read_ini(s, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ParseError(source, static_cast<int>(e.line()), e.message());
  }
  const auto idx = index_lines(text);
  std::map<std::pair<std::string, std::string>, const Field*> known;
  std::set<std::string> sections;
  for (const auto& f : fields()) {
    known[{f.section, f.key}] = &f;
    sections.insert(f.section);
  }

  RunConfig c;
  for (const auto& [section, body] : tree) {
    const int sline = idx.sections.count(section) ? idx.sections.at(section) : 0;
    if (!sections.count(section)) {
      if (body.empty() && !body.data().empty())
        throw ParseError(source, idx.keys.count({"", section}) ? idx.keys.at({"", section}) : 0,
                         fmt::format("key '{}' outside any section", section));
      throw ParseError(source, sline, fmt::format("unknown section [{}]", section));
    }
    for (const auto& [key, value] : body) {
      const auto pos = std::make_pair(section, key);
      const int line = idx.keys.count(pos) ? idx.keys.at(pos) : sline;
      auto it = known.find(pos);
      if (it == known.end()) throw ParseError(source, line, fmt::format("unknown key '{}' in [{}]", key, section));
      try {
        it->second->set(c, trim(value.data()));
      } catch (const BadValue& b) {
        throw ParseError(source, line,
                         fmt::format("bad value '{}' for [{}] {}: expected {}", value.data(), section, key, b.expected));
      }
    }
  }
  return c;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path);
  return read_config(in, path);
}

}  // namespace coldloop::app
