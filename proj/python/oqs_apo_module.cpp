#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "oqs/acceptance.hpp"
#include "oqs/damped.hpp"
#include "oqs/dephasing.hpp"
#include "oqs/scenario.hpp"

namespace py = pybind11;

namespace {

oqs::DephasingState dephasing_state(double c0, double c1, double r, double q, double sigma) {
  return q == 0.0 ? oqs::DephasingState::gaussian(c0, c1, r, sigma)
                  : oqs::DephasingState::double_gaussian(c0, c1, r, q, sigma);
}

// {key: value} -> table as {"time_label", "time", "<method>": {"rho10", "rho11"}}
py::dict run_point(const std::map<std::string, std::string>& entries) {
  oqs::KeyValues kv;
  for (const auto& [k, v] : entries) kv.set(k, v);
  const oqs::TrajectoryTable t = oqs::run_point(oqs::make_config(kv));
  py::dict out;
  out["time_label"] = t.time_label;
  out["time"] = t.time;
  for (const auto& s : t.series) {
    py::dict d;
    d["rho10"] = s.rho10;
    d["rho11"] = s.rho11;
    out[py::str(s.method)] = d;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_oqs_apo, m) {
  m.doc() = "second-order master equations for initially correlated qubit-environment states";
  m.attr("__version__") = oqs::kToolVersion;

  py::register_exception<oqs::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<oqs::NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def(
      "coherence",
      [](const std::string& method, const std::vector<double>& times, double r, double c0, double c1,
         double q, double xi, double sigma) {
        const auto st = dephasing_state(c0, c1, r, q, sigma);
        return oqs::coherence_series(st, {xi, sigma}, oqs::parse_method(method), times);
      },
      py::arg("method"), py::arg("times"), py::arg("r"), py::arg("c0") = 0.70710678118654752,
      py::arg("c1") = 0.70710678118654752, py::arg("q") = 0.0, py::arg("xi") = 1.0,
      py::arg("sigma") = 1.0, "rho10(t) of the pure-dephasing model (q > 0 selects the double Gaussian)");

  m.def(
      "entanglement_entropy",
      [](double r, double c0, double c1, double q) {
        return oqs::entanglement_entropy(dephasing_state(c0, c1, r, q, 1.0));
      },
      py::arg("r"), py::arg("c0") = 0.70710678118654752, py::arg("c1") = 0.70710678118654752,
      py::arg("q") = 0.0);

  m.def(
      "damped_asymptote",
      [](const std::string& method, double gamma, double n, double c0, double c1) {
        oqs::BathSpec bath;
        bath.gamma = gamma;
        bath.n_bosons = n;
        const oqs::Asymptote a = oqs::asymptotic_population(method, bath, {c0, c1});
        return py::make_tuple(a.value, a.converged);
      },
      py::arg("method"), py::arg("gamma"), py::arg("n"), py::arg("c0") = 0.70710678118654752,
      py::arg("c1") = 0.70710678118654752, "(rho11 at late times, converged)");

  m.def("run_point", &run_point, py::arg("config"),
        "Runs one configuration given as {dotted key: value}");
  m.def("figure_names", &oqs::figure_names);

  m.def(
      "criterion",
      [](int id) {
        const oqs::CriterionResult c = oqs::run_criterion(id);
        return py::make_tuple(c.verdict == oqs::Verdict::pass, c.line());
      },
      py::arg("id"));
}
