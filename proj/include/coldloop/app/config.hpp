#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "coldloop/design.hpp"
#include "coldloop/imaging.hpp"
#include "coldloop/md/impact.hpp"
#include "coldloop/optim/optimizers.hpp"
#include "coldloop/surrogate.hpp"

namespace coldloop::app {

/// Everything a command needs. Defaults are the desk-scale setup; `full_scale()`
/// gives the large substrate.
struct RunConfig {
  md::ImpactConfig impact{};
  std::string potential;  // EAM file; empty selects the built-in analytic Cu table
  DesignPoint design{};   // simulate
  imaging::RenderRule render{};
  imaging::PipelineParams pipeline{};
  double stress_min = 0.0;   // eV, per-atom Von Mises stress * volume mapped to intensity 1
  double stress_max = 0.75;  // eV, mapped to 255 (about 10 GPa at the Cu atomic volume)
  std::vector<double> frame_times{0.0, 1.0, 1.5, 3.0, 6.0, 9.0};  // ps, top-view PNGs
  std::vector<double> stress_times{1.0, 1.5, 6.0};               // ps, stress PNGs

  std::string objective = "simulation";  // simulation | analytic
  double penalty = 10.0;
  std::size_t replicas = 1;

  std::string algorithm = "pso";  // ego | pso | de
  optim::EgoOptions ego{};
  optim::PsoOptions pso{};
  optim::DeOptions de{};

  std::size_t train_samples = 1000;
  std::size_t test_samples = 1000;
  nn::TrainOptions train{};
  bool verify = false;  // re-simulate the surrogate optimum once

  std::uint64_t seed = 1;
  std::size_t workers = 1;

  static RunConfig full_scale();
  bool operator==(const RunConfig& o) const;
};

/// INI text: `[section]` headers, `key = value` lines, `;` comments. Every field is
/// written, with its documentation as a comment, so the output is a complete schema.
void write_config(std::ostream& out, const RunConfig& config, bool with_comments = true);
std::string config_to_string(const RunConfig& config, bool with_comments = true);

/// Keys absent from the text keep their defaults. Unknown sections or keys and
/// malformed values raise ParseError with the offending line.
RunConfig read_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config_file(const std::string& path);

/// One documented key of the schema.
struct ConfigKey {
  std::string section, key, doc;
};
std::vector<ConfigKey> config_schema();

}  // namespace coldloop::app
