#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "coldloop/app/commands.hpp"
#include "coldloop/md/scene.hpp"

namespace py = pybind11;
using namespace coldloop;

namespace {

py::dict trace_dict(const optim::OptimizationTrace& t) {
  py::list entries;
  for (const auto& e : t.entries)
    entries.append(py::dict(py::arg("iteration") = e.iteration, py::arg("cum_tp") = e.cum_tp,
                            py::arg("best_x") = e.best_x, py::arg("best_f") = e.best_f));
  return py::dict(py::arg("algorithm") = t.algorithm, py::arg("best_x") = t.best_x, py::arg("best_f") = t.best_f,
                  py::arg("calls") = t.calls, py::arg("cum_tp") = t.cum_tp, py::arg("trace") = entries);
}

py::dict ledger_dict(const app::RunLedger& l) {
  return py::dict(py::arg("method") = l.method, py::arg("modeling_tp") = l.modeling_tp,
                  py::arg("optimization_tp") = l.optimization_tp, py::arg("total_tp") = l.total_tp(),
                  py::arg("verification_tp") = l.verification_tp, py::arg("test_tp") = l.test_tp);
}

app::CommandOptions options(const app::RunConfig& c, const std::string& out, bool audit) { return {c, out, audit}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cold-spray impact simulation, splat imaging and design optimization";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<BoundsError>(m, "BoundsError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<DesignPoint>(m, "DesignPoint")
      .def(py::init<>())
      .def(py::init([](double v, double r, double theta) { return DesignPoint{v, r, theta}; }), py::arg("v"),
           py::arg("r"), py::arg("theta"))
      .def_readwrite("v", &DesignPoint::v)
      .def_readwrite("r", &DesignPoint::r)
      .def_readwrite("theta", &DesignPoint::theta)
      .def("__eq__", &DesignPoint::operator==)
      .def("__repr__", [](const DesignPoint& d) {
        return "DesignPoint(v=" + std::to_string(d.v) + ", r=" + std::to_string(d.r) +
               ", theta=" + std::to_string(d.theta) + ")";
      });

  m.def("analytic_flattening_cost", &analytic_flattening_cost, py::arg("design"));
  m.def(
      "fcc_atom_count",
      [](std::array<double, 3> lengths, double a) {
        return md::build_fcc_region(lengths, a, md::Group::Substrate).size();
      },
      py::arg("lengths"), py::arg("lattice_constant"));

  m.def("latin_hypercube", &optim::latin_hypercube, py::arg("n"), py::arg("dims"), py::arg("seed"));
  m.def(
      "minimize",
      [](const std::function<double(const optim::Vector&)>& f, const optim::Vector& lower,
         const optim::Vector& upper, const std::string& algorithm, std::uint64_t seed, std::size_t population,
         std::size_t generations, std::size_t n_init, std::size_t n_infill) {
        optim::FunctionProblem p(f, lower, upper);
        if (algorithm == "pso") {
          optim::PsoOptions o;
          o.particles = population;
          o.generations = generations;
          return trace_dict(optim::run_pso(p, o, seed));
        }
        if (algorithm == "de") {
          optim::DeOptions o;
          o.population = population;
          o.generations = generations;
          return trace_dict(optim::run_de(p, o, seed));
        }
        if (algorithm == "ego") {
          optim::EgoOptions o;
          o.n_init = n_init;
          o.n_infill = n_infill;
          return trace_dict(optim::run_ego(p, o, seed));
        }
        throw Error("unknown algorithm '" + algorithm + "'");
      },
      py::arg("f"), py::arg("lower"), py::arg("upper"), py::arg("algorithm") = "pso", py::arg("seed") = 1,
      py::arg("population") = 20, py::arg("generations") = 100, py::arg("n_init") = 20, py::arg("n_infill") = 100);

  py::class_<app::RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_static("full_scale", &app::RunConfig::full_scale)
      .def_static(
          "from_ini",
          [](const std::string& text) {
            std::istringstream in(text);
            return app::read_config(in, "<string>");
          },
          py::arg("text"))
      .def_static("load", &app::load_config_file, py::arg("path"))
      .def("to_ini", &app::config_to_string, py::arg("with_comments") = true)
      .def_readwrite("design", &app::RunConfig::design)
      .def_readwrite("objective", &app::RunConfig::objective)
      .def_readwrite("algorithm", &app::RunConfig::algorithm)
      .def_readwrite("potential", &app::RunConfig::potential)
      .def_readwrite("seed", &app::RunConfig::seed)
      .def_readwrite("workers", &app::RunConfig::workers)
      .def_readwrite("train_samples", &app::RunConfig::train_samples)
      .def_readwrite("test_samples", &app::RunConfig::test_samples)
      .def_readwrite("verify", &app::RunConfig::verify)
      .def_property(
          "epochs", [](const app::RunConfig& c) { return c.train.epochs; },
          [](app::RunConfig& c, std::size_t e) { c.train.epochs = e; })
      .def_property(
          "substrate_lengths", [](const app::RunConfig& c) { return c.impact.scene.substrate_lengths; },
          [](app::RunConfig& c, const Vec3& l) { c.impact.scene.substrate_lengths = l; })
      .def("__eq__", &app::RunConfig::operator==);

  m.def("config_schema", [] {
    std::vector<std::tuple<std::string, std::string, std::string>> out;
    for (const auto& k : app::config_schema()) out.emplace_back(k.section, k.key, k.doc);
    return out;
  });

  m.def(
      "simulate",
      [](const app::RunConfig& c, const std::string& out) {
        const auto r = app::cmd_simulate(options(c, out, false));
        return py::dict(py::arg("run_dir") = r.run_dir, py::arg("frames") = r.frames,
                        py::arg("topview_times") = r.topview_times, py::arg("stress_times") = r.stress_times);
      },
      py::arg("config"), py::arg("out") = "runs");
  m.def(
      "measure",
      [](const app::RunConfig& c, const std::string& dumps, const std::string& out, bool audit) {
        const auto r = app::cmd_measure(options(c, out, audit), dumps);
        const auto& mm = r.measurement;
        return py::dict(py::arg("run_dir") = r.run_dir, py::arg("S_i") = mm.S_i, py::arg("S_m") = mm.S_m,
                        py::arg("mu") = mm.mu, py::arg("c") = r.c, py::arg("frame_of_max") = mm.frame_of_max,
                        py::arg("frames") = mm.frames.size());
      },
      py::arg("config"), py::arg("dumps"), py::arg("out") = "runs", py::arg("audit") = false);
  m.def(
      "optimize",
      [](const app::RunConfig& c, const std::string& out) {
        const auto r = app::cmd_optimize(options(c, out, false));
        auto d = trace_dict(r.trace);
        d["run_dir"] = r.run_dir;
        d["ledger"] = ledger_dict(r.ledger);
        return d;
      },
      py::arg("config"), py::arg("out") = "runs");
  m.def(
      "train_surrogate",
      [](const app::RunConfig& c, const std::string& out) {
        const auto r = app::cmd_train_surrogate(options(c, out, false));
        return py::dict(py::arg("run_dir") = r.run_dir, py::arg("ledger") = ledger_dict(r.ledger),
                        py::arg("train_R") = r.train_regression.R, py::arg("test_R") = r.test_regression.R,
                        py::arg("test_mse") = r.test_regression.mse,
                        py::arg("validation_mse") = r.report.validation_mse,
                        py::arg("best_epoch") = r.report.best_epoch);
      },
      py::arg("config"), py::arg("out") = "runs");
  m.def(
      "surrogate_optimize",
      [](const app::RunConfig& c, const std::string& network, const std::string& out) {
        const auto r = app::cmd_surrogate_optimize(options(c, out, false), network);
        auto d = trace_dict(r.trace);
        d["run_dir"] = r.run_dir;
        d["ledger"] = ledger_dict(r.ledger);
        d["verified_c"] = r.verified_c >= 0.0 ? py::cast(r.verified_c) : py::none();
        return d;
      },
      py::arg("config"), py::arg("network"), py::arg("out") = "runs");
  m.def(
      "report",
      [](const std::vector<std::filesystem::path>& runs, const std::string& out) {
        return app::cmd_report(options(app::RunConfig{}, out, false), runs);
      },
      py::arg("runs"), py::arg("out") = "runs");
  m.def("gen_potential", &app::cmd_gen_potential, py::arg("path"));

  py::class_<nn::MLPNetwork>(m, "MLPNetwork")
      .def(py::init<>())
      .def(py::init<std::vector<std::size_t>>(), py::arg("layers"))
      .def_static("load", &nn::MLPNetwork::load_file, py::arg("path"))
      .def("save", &nn::MLPNetwork::save_file, py::arg("path"))
      .def_property_readonly("layers", &nn::MLPNetwork::layers)
      .def("forward", &nn::MLPNetwork::forward, py::arg("x"))
      .def("__eq__", &nn::MLPNetwork::operator==);

  m.def(
      "read_png",
      [](const std::string& path) {
        const auto img = imaging::read_png(path);
        py::array_t<std::uint8_t> a({img.height, img.width});
        std::copy(img.pixels.begin(), img.pixels.end(), a.mutable_data());
        return a;
      },
      py::arg("path"));
}
