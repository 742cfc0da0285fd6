#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "davenport/arith.hpp"
#include "davenport/errors.hpp"
#include "davenport/eval.hpp"
#include "davenport/family.hpp"
#include "davenport/regularity.hpp"
#include "davenport/sobolev.hpp"
#include "davenport/spectrum.hpp"
#include "davenport/transforms.hpp"

namespace py = pybind11;
using namespace davenport;

namespace {

// JSON crosses the boundary as text; the Python side decodes it with the json module.
py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }
nlohmann::json from_py(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::dict map_to_dict(const LatticeMap& m) {
  py::dict out;
  for (const auto& [q, e] : m.entries()) out[py::tuple(py::cast(q.coords()))] = e.value;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Davenport series: coefficient calculus, evaluation and regularity";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<ResourceLimit>(m, "ResourceLimit", PyExc_MemoryError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<CoefficientFamily>(m, "Family")
      .def_static("zero", &CoefficientFamily::zero, py::arg("d"))
      .def_static("hecke", &CoefficientFamily::hecke, py::arg("beta"))
      .def_static("f_beta", &CoefficientFamily::f_beta, py::arg("beta"))
      .def_static("l_adic", &CoefficientFamily::l_adic, py::arg("l"), py::arg("alpha"))
      .def_static(
          "power_lacunary",
          [](Int base, std::vector<Int> dir, double gamma) {
            return CoefficientFamily::power_lacunary(base, LatticeVector(std::move(dir)), gamma);
          },
          py::arg("base"), py::arg("direction"), py::arg("gamma"))
      .def_static(
          "finite",
          [](int d, const std::vector<std::pair<std::vector<Int>, double>>& entries) {
            std::vector<std::pair<LatticeVector, double>> e;
            for (const auto& [n, v] : entries) e.emplace_back(LatticeVector(n), v);
            return CoefficientFamily::finite(d, std::move(e));
          },
          py::arg("d"), py::arg("entries"))
      .def_static("from_json", [](const py::object& o) { return CoefficientFamily::from_json(from_py(o)); })
      .def("to_json", [](const CoefficientFamily& a) { return to_py(a.to_json()); })
      .def_property_readonly("d", &CoefficientFamily::dimension)
      .def_property_readonly("kind", &CoefficientFamily::kind_name)
      .def("coefficient", [](const CoefficientFamily& a, std::vector<Int> n) { return a.value_at(LatticeVector(std::move(n))); })
      .def("__repr__", [](const CoefficientFamily& a) { return "Family(" + a.to_json().dump() + ")"; });

  m.def("mobius", &mobius, py::arg("n"));
  m.def("divisors", &divisors, py::arg("n"));
  m.def(
      "sigma",
      [](std::vector<Int> v, double z, bool vector_divisors) {
        return sigma_power(LatticeVector(std::move(v)), z, vector_divisors ? DivisorVariant::vector : DivisorVariant::integer);
      },
      py::arg("m"), py::arg("z"), py::arg("vector_divisors") = true);

  m.def(
      "partial_sum",
      [](const CoefficientFamily& a, double N, const std::vector<double>& x) {
        const PartialSum p = partial_sum(a, N, x);
        return py::make_tuple(p.value, p.tail_bound);
      },
      py::arg("family"), py::arg("N"), py::arg("x"), "Returns (value, tail_bound).");
  m.def(
      "grid_eval",
      [](const CoefficientFamily& a, double N, const py::object& grid) {
        const GridValues v = grid_eval(a, N, GridSpec::from_json(from_py(grid)));
        return py::make_tuple(v.values, v.tail_bound);
      },
      py::arg("family"), py::arg("N"), py::arg("grid"), "Row-major values and the tail bound.");

  m.def(
      "jump_operator",
      [](const CoefficientFamily& a, double Q, Int L) { return map_to_dict(jump_operator(a, Q, L)); },
      py::arg("family"), py::arg("Q_radius"), py::arg("L_max") = 1024);
  m.def(
      "maximal_operator",
      [](const CoefficientFamily& a, double Q, Int L) { return map_to_dict(maximal_operator(a, Q, L)); },
      py::arg("family"), py::arg("Q_radius"), py::arg("L_max") = 1024);
  m.def(
      "fourier_coefficient",
      [](const CoefficientFamily& a, std::vector<Int> mv, Int trunc) {
        return davenport_to_fourier(a, LatticeVector(std::move(mv)), trunc);
      },
      py::arg("family"), py::arg("m"), py::arg("trunc"));

  m.def(
      "holder_exponent",
      [](const CoefficientFamily& a, const std::vector<double>& x0, double r0, double r, bool empirical) {
        return to_py(holder_exponent(a, x0, r0, r, empirical).to_json());
      },
      py::arg("family"), py::arg("x0"), py::arg("R0"), py::arg("R"), py::arg("empirical") = false);

  m.def(
      "theoretical_spectrum",
      [](double gamma, int d, double h) -> py::object {
        const SpectrumValue v = theoretical_spectrum(gamma, d, h);
        if (v.empty) return py::none();
        return py::float_(v.value);
      },
      py::arg("gamma_a"), py::arg("d"), py::arg("h"), "None when the iso-Holder set is empty.");
  m.def(
      "empirical_spectrum",
      [](const CoefficientFamily& a, const py::object& grid, double R) {
        SpectrumOptions o;
        o.r = R;
        return to_py(empirical_spectrum(a, GridSpec::from_json(from_py(grid)), o).to_json(a));
      },
      py::arg("family"), py::arg("grid"), py::arg("R") = 0x1p20);

  m.def(
      "classify_sobolev", [](double gamma, int d) { return classify_sobolev(gamma, d).str(); }, py::arg("gamma"),
      py::arg("d"));
  m.def(
      "fourier_bound_check",
      [](const CoefficientFamily& a, double gamma, double M) { return to_py(fourier_bound_check(a, gamma, M).to_json()); },
      py::arg("family"), py::arg("gamma"), py::arg("M"));
}
