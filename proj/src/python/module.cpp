#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "heatlab/cli.hpp"
#include "heatlab/config.hpp"
#include "heatlab/estimator.hpp"
#include "heatlab/io.hpp"
#include "heatlab/kernel.hpp"
#include "heatlab/logscalar.hpp"
#include "heatlab/schedule.hpp"
#include "heatlab/spikes.hpp"

namespace py = pybind11;
using namespace heatlab;

namespace {

// Reports cross the boundary as plain dicts, through their JSON form.
py::object to_py(const io::Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

InitialData data_from(const std::string& text, const std::string& section) {
  return parse_initial_data(parse_config(text).at(section));
}

}  // namespace

PYBIND11_MODULE(_heatlab, m) {
  m.doc() = "Heat equation uniqueness-class experiments";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<QuadratureError>(m, "QuadratureError", PyExc_RuntimeError);

  py::class_<LogScalar>(m, "LogScalar")
      .def(py::init<>())
      .def_static("from_real", &LogScalar::from_real)
      .def_static("from_log", [](double ln) { return LogScalar::from_log(ln); })
      .def_property_readonly("sign", [](const LogScalar& x) { return static_cast<int>(x.sign()); })
      .def_property_readonly("ln", &LogScalar::log_abs)
      .def_property_readonly("cancelled", &LogScalar::cancelled)
      .def("__float__", &LogScalar::to_real)
      .def("__add__", [](const LogScalar& a, const LogScalar& b) { return a + b; })
      .def("__mul__", [](const LogScalar& a, const LogScalar& b) { return a * b; })
      .def("__repr__", [](const LogScalar& x) {
        return "LogScalar(sign=" + std::to_string(static_cast<int>(x.sign())) + ", ln=" + std::to_string(x.log_abs()) + ")";
      });

  m.def("heat_kernel", &heat_kernel, py::arg("n"), py::arg("distsq"), py::arg("t"));

  m.def(
      "classify_osgood",
      [](const std::string& text) { return to_py(io::to_json(classify_osgood(parse_growth(parse_config(text).at("growth"))))); },
      py::arg("config"), "Verdict for the [growth] section of a config text.");
  m.def(
      "build_schedule",
      [](const std::string& text) {
        const auto cfg = parse_config(text);
        const auto L = cfg.has("growth") ? parse_growth(cfg.at("growth")) : GrowthFunction::power(1.0, 2.0);
        const auto* s = cfg.find("schedule");
        return to_py(io::to_json(build_schedule(parse_schedule(s ? *s : ConfigSection{}, L)), true));
      },
      py::arg("config"));
  m.def("cutoff_constant", &cutoff_constant, py::arg("m"));

  py::class_<SolutionHandle>(m, "Solution")
      .def(py::init([](const std::string& text, const std::string& section) {
             return SolutionHandle(data_from(text, section));
           }),
           py::arg("config"), py::arg("section") = "data")
      .def_property_readonly("dimension", &SolutionHandle::dimension)
      .def_property_readonly("spike_count", [](const SolutionHandle& s) { return s.data().spikes.size(); })
      .def(
          "evolve_point",
          [](const SolutionHandle& s, double axial, double radial, double t) { return s.evolve_point({axial, radial}, t); },
          py::arg("axial"), py::arg("radial"), py::arg("t"))
      .def(
          "spatial_integral",
          [](const SolutionHandle& s, double center, double radius, double p, double t, double tol) {
            EstimatorOptions o;
            o.rel_tol = tol;
            const auto r = spatial_integral(s, Region{center, radius}, p, t, o);
            return py::make_tuple(r.value, r.rel_error);
          },
          py::arg("center"), py::arg("radius"), py::arg("p"), py::arg("t"), py::arg("tol") = 1e-6)
      .def(
          "spacetime_integral",
          [](const SolutionHandle& s, double center, double radius, double p, double a, double tol, int threads) {
            EstimatorOptions o;
            o.rel_tol = tol;
            o.threads = threads;
            IntegralReport r;
            {
              py::gil_scoped_release release;
              r = spacetime_integral(s, Region{center, radius}, p, a, o);
            }
            return to_py(io::to_json(r));
          },
          py::arg("center"), py::arg("radius"), py::arg("p") = 2.0, py::arg("a") = 0.0, py::arg("tol") = 1e-6,
          py::arg("threads") = 1)
      .def("membership_ceiling", [](const SolutionHandle& s, double a) { return membership_ceiling(s, a); }, py::arg("a"))
      .def(
          "vanishing_probe",
          [](const SolutionHandle& s, double R, double t0, int count) {
            const auto t = halving_times(t0, count);
            return to_py(io::to_json(small_time_vanishing_probe(s, R, t)));
          },
          py::arg("R") = 2.0, py::arg("t0") = 0.5, py::arg("count") = 10);

  m.def(
      "spike_radii",
      [](int n, int i) {
        const auto r = spike_radii(n, i);
        return py::make_tuple(r.ln_r, r.ln_rtilde);
      },
      py::arg("n"), py::arg("i"));
  m.def(
      "integral_lower_bound",
      [](int n, int i) {
        const auto b = integral_lower_bound(n, i);
        py::dict d;
        d["exact"] = b.exact;
        d["floor"] = b.floor;
        d["ln_C"] = b.ln_C;
        d["q"] = b.q;
        d["target_exponent"] = b.target_exponent;
        return d;
      },
      py::arg("n"), py::arg("i"));
  m.def(
      "verify_example",
      [](int n, int i_max, double a, int envelope_samples, std::uint64_t seed) {
        ExampleOptions o;
        o.a = a;
        o.envelope_samples = envelope_samples;
        o.seed = seed;
        Section3Config c;
        c.n = n;
        c.i_max = i_max;
        ExampleReport rep;
        {
          py::gil_scoped_release release;
          rep = verify_example(c, o);
        }
        return to_py(io::to_json(rep));
      },
      py::arg("n") = 3, py::arg("i_max") = 2, py::arg("a") = 2.0, py::arg("envelope_samples") = 1000,
      py::arg("seed") = 1);

  m.def(
      "run",
      [](const std::string& subcommand, const std::filesystem::path& config, const std::filesystem::path& out,
         std::uint64_t seed, int threads, double tol) {
        RunConfig rc;
        rc.subcommand = parse_subcommand(subcommand);
        rc.config_path = config;
        rc.out_dir = out;
        rc.seed = seed;
        rc.threads = threads;
        rc.tol = tol;
        RunOutcome o;
        {
          py::gil_scoped_release release;
          o = heatlab::run(rc);
        }
        return py::make_tuple(o.status, o.diagnostic);
      },
      py::arg("subcommand"), py::arg("config"), py::arg("out"), py::arg("seed") = 1, py::arg("threads") = 1,
      py::arg("tol") = 1e-6, "Same as the command-line tool; returns (exit status, diagnostic).");
}
