#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gcurv/flatness.hpp"
#include "gcurv/scenarios.hpp"

namespace py = pybind11;
using namespace gcurv;

namespace {

py::array_t<double> to_numpy(const RealTensor& t) {
  std::vector<py::ssize_t> shape;
  for (int k = 0; k < t.rank(); ++k) shape.push_back(t.extent(k));
  py::array_t<double> out(shape);
  std::copy(t.data().begin(), t.data().end(), out.mutable_data());
  return out;
}

py::dict report_dict(const ResidualReport& r) {
  py::dict d;
  d["point"] = r.point;
  d["pass"] = r.pass();
  if (!r.error.empty()) d["error"] = r.error;
  py::list entries;
  for (const auto& e : r.entries) {
    py::dict x;
    x["name"] = e.name;
    x["residual"] = e.residual;
    x["tolerance"] = e.tolerance;
    x["pass"] = e.pass;
    entries.append(x);
  }
  d["entries"] = entries;
  return d;
}

Scenario resolve(const py::object& sc) {
  if (py::isinstance<Scenario>(sc)) return sc.cast<Scenario>();
  const std::string name = sc.cast<std::string>();
  if (name.size() > 5 && name.compare(name.size() - 5, 5, ".json") == 0) return load_scenario(name);
  return find_scenario(name);
}

// Points may be given in the ambient chart or, when the scenario has a
// hypersurface, in its chart; the lengths always differ by one.
std::vector<double> ambient(const Scenario& sc, const std::vector<double>& p) {
  if (static_cast<int>(p.size()) == sc.ambient.dim()) return p;
  return sc.ambient_point(p);
}

}  // namespace

PYBIND11_MODULE(gcurv, m) {
  m.doc() = "Generalised curvature of metric, three-form and dilaton data";

  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);
  py::register_exception<GeometryError>(m, "GeometryError", PyExc_ArithmeticError);

  py::class_<Scenario>(m, "Scenario")
      .def_static("builtin", &find_scenario, py::arg("name"))
      .def_static("from_json", &parse_scenario, py::arg("text"))
      .def_static("from_file", &load_scenario, py::arg("path"))
      .def_readonly("name", &Scenario::name)
      .def_readonly("description", &Scenario::description)
      .def_readonly("points", &Scenario::points)
      .def_property_readonly("dim", [](const Scenario& s) { return s.ambient.dim(); })
      .def_property_readonly("coords", [](const Scenario& s) { return s.ambient.chart.coords; })
      .def_property_readonly("has_hypersurface", [](const Scenario& s) { return s.embedding.has_value(); })
      .def("resample", &Scenario::resample, py::arg("seed"), py::arg("count") = 5)
      .def("ambient_point", &Scenario::ambient_point, py::arg("point"))
      .def("validate", [](const Scenario& s) { validate_scenario(s); })
      .def("__repr__", [](const Scenario& s) { return "<Scenario " + s.name + ">"; });

  m.def("scenario_names", [] {
    std::vector<std::string> out;
    for (const auto& s : builtin_scenarios()) out.push_back(s.name);
    return out;
  });

  m.def(
      "verify",
      [](const py::object& sc, const std::string& suite, std::optional<double> tol, std::optional<std::uint64_t> seed) {
        Scenario s = resolve(sc);
        if (seed) s.resample(*seed);
        const Suite su = parse_suite(suite);
        std::vector<ResidualReport> reps;
        {
          py::gil_scoped_release release;
          reps = run_suite(su, s, tol);
        }
        py::dict out;
        out["scenario"] = s.name;
        out["suite"] = suite_name(su);
        bool all = true;
        py::list lst;
        for (const auto& r : reps) {
          all = all && r.pass();
          lst.append(report_dict(r));
        }
        out["pass"] = all;
        out["reports"] = lst;
        return out;
      },
      py::arg("scenario"), py::arg("suite") = "all", py::arg("tol") = py::none(), py::arg("seed") = py::none());

  m.def(
      "verify_json",
      [](const py::object& sc, const std::string& suite, std::optional<double> tol) {
        const Scenario s = resolve(sc);
        const Suite su = parse_suite(suite);
        return reports_json(s.name, suite_name(su), run_suite(su, s, tol));
      },
      py::arg("scenario"), py::arg("suite") = "all", py::arg("tol") = py::none());

  m.def(
      "gen_scalar",
      [](const py::object& sc, const std::vector<double>& p) {
        const Scenario s = resolve(sc);
        return gen_scalar(s.ambient, ambient(s, p));
      },
      py::arg("scenario"), py::arg("point"));

  m.def(
      "gen_ricci",
      [](const py::object& sc, const std::vector<double>& p) {
        const Scenario s = resolve(sc);
        const GenRicciMixed r = gen_ricci_mixed(s.ambient, ambient(s, p));
        return py::make_tuple(to_numpy(r.rc_plus), to_numpy(r.rc_minus));
      },
      py::arg("scenario"), py::arg("point"));

  m.def(
      "ricci",
      [](const py::object& sc, const std::vector<double>& p) {
        const Scenario s = resolve(sc);
        return to_numpy(curvature(s.ambient, ambient(s, p)).Rc);
      },
      py::arg("scenario"), py::arg("point"));

  m.def(
      "flatness",
      [](const py::object& sc, const std::vector<double>& p) {
        const Scenario s = resolve(sc);
        py::dict d;
        for (const auto& [name, v] : flatness_report(s.ambient, ambient(s, p)).fields()) d[py::str(name)] = v;
        return d;
      },
      py::arg("scenario"), py::arg("point"));

  m.def(
      "reconstruct",
      [](const py::object& sc, int n) {
        const Scenario s = resolve(sc);
        if (!s.fundamental || !s.grid) throw ScenarioError("scenario '" + s.name + "' has no (h, k) data");
        GridSpec g = *s.grid;
        g.n = n;
        const Immersion im = reconstruct_immersion(*s.fundamental, g);
        py::array_t<double> pts({static_cast<py::ssize_t>(n), static_cast<py::ssize_t>(n), py::ssize_t{3}});
        double* out = pts.mutable_data();
        for (const auto& p : im.F)
          for (double c : p) *out++ = c;
        py::dict d;
        d["points"] = pts;
        d["path_residual"] = im.path_residual;
        d["metric_residual"] = im.metric_residual;
        d["max_gc_residual"] = im.max_gc_residual;
        return d;
      },
      py::arg("scenario"), py::arg("n") = 33);
}
