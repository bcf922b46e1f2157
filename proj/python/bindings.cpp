// Python bindings for the poise core.

#include <Python.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "poise/costs.hpp"
#include "poise/dosy.hpp"
#include "poise/errors.hpp"
#include "poise/harness.hpp"
#include "poise/optim.hpp"
#include "poise/routines.hpp"
#include "poise/simnmr.hpp"
#include "poise/spectra.hpp"

namespace py = pybind11;
using namespace poise;

namespace {

PyObject* g_error = nullptr;

py::dict result_dict(const optim::OptResult& r) {
  py::list traj;
  for (const auto& s : r.trajectory) traj.append(py::make_tuple(s.x, s.f));
  py::dict d;
  d["x_best"] = r.x_best;
  d["f_best"] = r.f_best;
  d["nfev"] = r.nfev;
  d["trajectory"] = traj;
  d["termination"] = std::string(optim::to_string(r.termination));
  return d;
}

py::dict outcome_dict(const RunOutcome& o) {
  py::dict d = result_dict(o.result);
  d["routine"] = o.routine.name;
  d["pars"] = o.routine.pars;
  d["acquisitions"] = o.acquisitions;
  d["backend"] = o.backend;
  d["seed"] = o.seed;
  d["log_path"] = o.log_path.string();
  return d;
}

optim::Objective wrap(py::function f) {
  return [f](std::span<const double> x) {
    py::gil_scoped_acquire gil;
    return optim::Evaluation{f(std::vector<double>(x.begin(), x.end())).cast<double>()};
  };
}

RunConfig make_config(const std::string& routine, const std::string& algorithm,
                      std::optional<std::size_t> max_fev, const std::string& region,
                      std::optional<std::uint64_t> seed, std::optional<SimConfig> sim_config,
                      const std::string& sim_config_path, const std::string& out_dir,
                      const std::string& routines_dir) {
  RunConfig c;
  c.routine = routine;
  c.algorithm = optim::algorithm_from_string(algorithm);
  c.max_fev = max_fev;
  c.region = Region::parse(region);
  c.seed = seed;
  c.sim_config = std::move(sim_config);
  c.sim_config_path = sim_config_path;
  c.out_dir = out_dir;
  c.routines_dir = routines_dir;
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Closed-loop NMR parameter optimization against a simulated spectrometer";

  g_error = PyErr_NewException("poise._core.PoiseError", PyExc_RuntimeError, nullptr);
  Py_INCREF(g_error);
  m.add_object("PoiseError", py::handle(g_error));
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(g_error)(e.what());
      inst.attr("kind") = e.kind();
      PyErr_SetObject(g_error, inst.ptr());
    }
  });

  m.def("scale", [](const std::vector<double>& x, const std::vector<double>& lb,
                    const std::vector<double>& ub) { return optim::scale(x, lb, ub); });
  m.def("unscale", [](const std::vector<double>& z, const std::vector<double>& lb,
                      const std::vector<double>& ub) { return optim::unscale(z, lb, ub); });

  m.def(
      "minimize",
      [](py::function objective, std::vector<double> lb, std::vector<double> ub,
         std::vector<double> init, std::vector<double> tol, const std::string& algorithm,
         std::optional<std::size_t> max_fev) {
        const optim::ScaledProblem p{std::move(lb), std::move(ub), std::move(init), std::move(tol),
                                     wrap(std::move(objective))};
        const auto a = optim::algorithm_from_string(algorithm);
        return result_dict(optim::minimize(a, p, max_fev.value_or(optim::default_max_fev(p.dim()))));
      },
      py::arg("objective"), py::arg("lb"), py::arg("ub"), py::arg("init"), py::arg("tol"),
      py::arg("algorithm") = "tr", py::arg("max_fev") = py::none());

  m.def(
      "grid_search",
      [](py::function objective, std::vector<double> lb, std::vector<double> ub,
         std::vector<double> tol, std::optional<std::vector<std::size_t>> steps) {
        std::vector<double> init = lb;
        const optim::ScaledProblem p{std::move(lb), std::move(ub), std::move(init), std::move(tol),
                                     wrap(std::move(objective))};
        return result_dict(optim::grid_search(p, steps.value_or(optim::default_grid_steps(p))));
      },
      py::arg("objective"), py::arg("lb"), py::arg("ub"), py::arg("tol"),
      py::arg("steps") = py::none());

  py::class_<Routine>(m, "Routine")
      .def(py::init<>())
      .def_readwrite("name", &Routine::name)
      .def_readwrite("pars", &Routine::pars)
      .def_readwrite("lb", &Routine::lb)
      .def_readwrite("ub", &Routine::ub)
      .def_readwrite("init", &Routine::init)
      .def_readwrite("tol", &Routine::tol)
      .def_readwrite("cf", &Routine::cf)
      .def_readwrite("au", &Routine::au)
      .def("validate", &Routine::validate)
      .def("__eq__", [](const Routine& a, const Routine& b) { return a == b; })
      .def("__repr__", [](const Routine& r) { return "<Routine " + r.name + ">"; });

  m.def("parse_routine", &parse_routine);
  m.def("write_routine", &write_routine);
  m.def("load_routine", [](const std::string& name, const std::string& dir) {
    return load_routine(resolve_routines_dir(dir), name);
  }, py::arg("name"), py::arg("routines_dir") = "");
  m.def("list_routines", [](const std::string& dir) { return list_routines(resolve_routines_dir(dir)); },
        py::arg("routines_dir") = "");

  py::class_<Spectrum1D>(m, "Spectrum")
      .def(py::init<std::vector<double>, std::vector<double>, double, double, double>(),
           py::arg("real"), py::arg("imag"), py::arg("spectral_width_hz"),
           py::arg("transmitter_offset_hz"), py::arg("spectrometer_freq_mhz"))
      .def_property_readonly("real", [](const Spectrum1D& s) { return s.real(); })
      .def_property_readonly("imag", [](const Spectrum1D& s) { return s.imag(); })
      .def_property_readonly("spectral_width", &Spectrum1D::spectral_width)
      .def_property_readonly("transmitter_offset", &Spectrum1D::transmitter_offset)
      .def_property_readonly("spectrometer_freq", &Spectrum1D::spectrometer_freq)
      .def("ppm", &Spectrum1D::ppm)
      .def("__len__", &Spectrum1D::size);

  m.def("load_spectrum", &load_spectrum);
  m.def("save_spectrum", &save_spectrum);

  m.def("cost_names", [] { return CostRegistry::with_builtins().names(); });
  m.def(
      "cost",
      [](const std::string& name, std::optional<Spectrum1D> spectrum, const std::string& region,
         std::optional<Spectrum1D> target, std::optional<Spectrum1D> reference,
         std::map<std::string, double> aux) {
        CostContext c;
        c.spectrum = std::move(spectrum);
        c.region = Region::parse(region);
        c.target = std::move(target);
        c.reference = std::move(reference);
        c.aux = std::move(aux);
        return CostRegistry::with_builtins().lookup(name)(c);
      },
      py::arg("name"), py::arg("spectrum") = py::none(), py::arg("region") = "whole",
      py::arg("target") = py::none(), py::arg("reference") = py::none(),
      py::arg("aux") = std::map<std::string, double>{});

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("p360_true", &SimConfig::p360_true)
      .def_readwrite("t1_values", &SimConfig::t1_values)
      .def_readwrite("tau_r", &SimConfig::tau_r)
      .def_readwrite("noe_sigma", &SimConfig::noe_sigma)
      .def_readwrite("noe_r1", &SimConfig::noe_r1)
      .def_readwrite("alpha_true", &SimConfig::alpha_true)
      .def_readwrite("water_offset_hz", &SimConfig::water_offset_hz)
      .def_readwrite("water_saturation_rate", &SimConfig::water_saturation_rate)
      .def_readwrite("diffusion_d", &SimConfig::diffusion_d)
      .def_readwrite("gamma", &SimConfig::gamma)
      .def_readwrite("delta", &SimConfig::delta)
      .def_readwrite("g_max_tesla_per_m", &SimConfig::g_max_tesla_per_m)
      .def_readwrite("inept_j_hz", &SimConfig::inept_j_hz)
      .def_readwrite("inept_r2", &SimConfig::inept_r2)
      .def_readwrite("noise_sigma", &SimConfig::noise_sigma)
      .def_readwrite("rng_seed", &SimConfig::rng_seed)
      .def("validate", &SimConfig::validate)
      .def("to_text", [](const SimConfig& c) { return write_sim_config(c); })
      .def_static("from_text", &parse_sim_config)
      .def_static("load", &load_sim_config);

  m.def("ernst_angle_deg", &sim::ernst_angle_deg, py::arg("tau_r"), py::arg("t1"));

  m.def(
      "run",
      [](const std::string& routine, const std::string& algorithm, std::optional<std::size_t> max_fev,
         const std::string& region, std::optional<std::uint64_t> seed,
         std::optional<SimConfig> sim_config, const std::string& sim_config_path,
         const std::string& out_dir, const std::string& routines_dir) {
        return outcome_dict(run(make_config(routine, algorithm, max_fev, region, seed,
                                            std::move(sim_config), sim_config_path, out_dir,
                                            routines_dir)));
      },
      py::arg("routine"), py::arg("algorithm") = "tr", py::arg("max_fev") = py::none(),
      py::arg("region") = "whole", py::arg("seed") = py::none(), py::arg("sim_config") = py::none(),
      py::arg("sim_config_path") = "", py::arg("out_dir") = "", py::arg("routines_dir") = "");

  m.def("parse_log", [](const std::string& path) {
    const LogRecord rec = parse_log_file(path);
    py::dict d;
    d["routine"] = rec.header.routine;
    d["algorithm"] = rec.header.algorithm;
    d["backend"] = rec.header.backend;
    d["region"] = rec.header.region;
    d["seed"] = rec.header.seed;
    d["start_time"] = rec.header.start_time;
    py::list rows;
    for (const auto& s : rec.rows) rows.append(py::make_tuple(s.x, s.f));
    d["rows"] = rows;
    if (rec.best) {
      d["x_best"] = rec.best->x;
      d["f_best"] = rec.best->f;
      d["nfev"] = rec.best->nfev;
      d["termination"] = std::string(optim::to_string(rec.best->termination));
    }
    d["error"] = rec.error ? py::object(py::str(*rec.error)) : py::object(py::none());
    return d;
  });

  m.def(
      "dosy_sequential",
      [](const std::string& algorithm, std::optional<std::uint64_t> seed,
         std::optional<SimConfig> sim_config, const std::string& out_dir,
         const std::string& routines_dir) {
        const auto out = dosy_sequential(
            DosyPlan{}, make_config("", algorithm, std::nullopt, "whole", seed, std::move(sim_config),
                                    "", out_dir, routines_dir));
        py::dict d = outcome_dict(out.phase2);
        d["delta"] = out.delta;
        d["g_max"] = out.g_max;
        py::list probes;
        for (const auto& p : out.probes) probes.append(py::make_tuple(p.delta, p.f_att));
        d["probes"] = probes;
        d["acquisitions"] = out.acquisitions;
        return d;
      },
      py::arg("algorithm") = "tr", py::arg("seed") = py::none(), py::arg("sim_config") = py::none(),
      py::arg("out_dir") = "", py::arg("routines_dir") = "");

  m.def(
      "dosy_simultaneous",
      [](const std::string& algorithm, std::optional<std::size_t> max_fev,
         std::optional<std::uint64_t> seed, std::optional<SimConfig> sim_config,
         const std::string& out_dir, const std::string& routines_dir) {
        return outcome_dict(dosy_simultaneous(make_config("", algorithm, max_fev, "whole", seed,
                                                          std::move(sim_config), "", out_dir,
                                                          routines_dir)));
      },
      py::arg("algorithm") = "tr", py::arg("max_fev") = py::none(), py::arg("seed") = py::none(),
      py::arg("sim_config") = py::none(), py::arg("out_dir") = "", py::arg("routines_dir") = "");
}
