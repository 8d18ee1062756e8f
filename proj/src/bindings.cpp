#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "affq/cli.hpp"
#include "affq/error.hpp"
#include "affq/halfosc.hpp"
#include "affq/phase_space.hpp"
#include "affq/representation.hpp"
#include "affq/verify.hpp"
#include "affq/weights.hpp"

namespace py = pybind11;
using namespace affq;

namespace {

Weight make_weight(const std::string& kind, double alpha, double t) {
  if (kind == "aw") return builtin(AwSpec{});
  if (kind == "acs") return builtin(AcsSpec{basis_state(BasisSpec{alpha, 3}, 0)});
  if (kind == "thermal") return builtin(ThermalSpec{alpha, t});
  throw ConfigError("unknown weight '" + kind + "' (expected aw, acs or thermal)");
}

py::array_t<double> as_grid_array(const QuasiDistribution& d) {
  const auto nq = static_cast<py::ssize_t>(d.grid.q_nodes.size());
  const auto np = static_cast<py::ssize_t>(d.grid.p_nodes.size());
  py::array_t<double> a({nq, np});
  std::copy(d.values.begin(), d.values.end(), a.mutable_data());
  return a;
}

py::dict check_dict(const verify::CheckResult& r) {
  py::list parts;
  for (const auto& p : r.parts)
    parts.append(py::dict(py::arg("name") = p.name, py::arg("measured") = p.measured, py::arg("threshold") = p.threshold,
                          py::arg("passed") = p.passed()));
  return py::dict(py::arg("id") = r.id, py::arg("name") = r.name, py::arg("passed") = r.passed, py::arg("parts") = parts,
                  py::arg("seconds") = r.seconds, py::arg("time_limit") = r.time_limit, py::arg("detail") = r.detail,
                  py::arg("line") = verify::format_line(r));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Affine covariant integral quantization";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<SyntaxError>(m, "SyntaxError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_NotImplementedError);

  m.def(
      "matrix_u",
      [](double alpha, int n_max, double q, double p) { return matrix_u(BasisSpec{alpha, n_max}, GroupElement(q, p)).entries; },
      py::arg("alpha"), py::arg("n_max"), py::arg("q"), py::arg("p"), "Matrix of U(q,p) in the Laguerre basis e_0..e_N.");
  m.def(
      "trace_u",
      [](double alpha, int n_max, double q, double p) {
        const auto r = trace_u(BasisSpec{alpha, n_max}, GroupElement(q, p));
        return py::make_tuple(r.value, r.error_estimate);
      },
      py::arg("alpha"), py::arg("n_max"), py::arg("q"), py::arg("p"), "Abel-summed trace and its error estimate.");
  m.def("trace_u_closed_form", &trace_u_closed_form, py::arg("q"), py::arg("alpha"));

  m.def(
      "quantize",
      [](const std::string& f, const std::string& weight, double alpha, int n_max, double t, int n_terms) {
        const auto obs = cli::parse_observable(f);
        const BasisSpec b{alpha, n_max};
        return weight == "thermal" ? thermal_quantize(alpha, t, obs, n_terms, b).matrix.entries
                                   : quantize(make_weight(weight, alpha, t), obs, b).matrix.entries;
      },
      py::arg("f"), py::arg("weight") = "aw", py::arg("alpha") = 2.0, py::arg("n_max") = 20, py::arg("t") = 0.5,
      py::arg("n_terms") = 150, "Matrix of A_f; for acs, alpha also selects the fiducial e_0^(alpha).");
  m.def(
      "lower_symbol",
      [](const std::string& f, double q, double p, const std::string& weight, double alpha, const std::string& method,
         double tol) {
        const auto obs = cli::parse_observable(f);
        const auto w = make_weight(weight, alpha, 0.5);
        if (method == "trace") return lower_symbol_trace(w, obs, {q, p}, tol);
        if (method == "closed") return lower_symbol(w, obs, {q, p});
        throw ConfigError("method must be closed or trace");
      },
      py::arg("f"), py::arg("q"), py::arg("p"), py::arg("weight") = "aw", py::arg("alpha") = 3.0,
      py::arg("method") = "closed", py::arg("tol") = 1e-7);
  m.def(
      "evaluate",
      [](const std::string& f, double q, double p) { return cli::parse_observable(f)(q, p); }, py::arg("f"), py::arg("q"),
      py::arg("p"), "Classical value of an observable expression.");

  m.def(
      "wigner_halfosc",
      [](int n, std::vector<double> q_nodes, std::vector<double> p_nodes, double rel_tol) {
        PhaseSpaceGrid g{std::move(q_nodes), std::move(p_nodes)};
        g.validate();
        return as_grid_array(wigner_aw(halfosc::eigenstate_analytic(n).phi, g, rel_tol));
      },
      py::arg("n"), py::arg("q_nodes"), py::arg("p_nodes"), py::arg("rel_tol") = 1e-10,
      "Affine Wigner function of the half-oscillator level n, shape (len(q), len(p)).");
  m.def(
      "halfosc_fd",
      [](int n_levels, double x_max, int n_points) {
        const auto fd = halfosc::eigensolve_fd(n_levels, x_max, n_points);
        std::vector<double> e, err;
        for (const auto& l : fd.levels) {
          e.push_back(l.energy);
          err.push_back(l.richardson_error);
        }
        return py::make_tuple(e, err);
      },
      py::arg("n_levels"), py::arg("x_max") = 12.0, py::arg("n_points") = 4000,
      "Finite-difference energies and their Richardson estimates.");
  m.def(
      "halfosc_laguerre",
      [](int n_levels, int n_max, double dilation) { return halfosc::laguerre_spectrum(BasisSpec{2.0, n_max}, n_levels, dilation); },
      py::arg("n_levels"), py::arg("n_max") = 60, py::arg("dilation") = 0.25);

  m.def("check_count", &verify::check_count);
  m.def(
      "run_check", [](int id, double tol_scale) { return check_dict(verify::run_check(id, {tol_scale})); }, py::arg("id"),
      py::arg("tol_scale") = 1.0);

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> all{"affq"};
        all.insert(all.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : all) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool; returns (exit_code, stdout, stderr).");
}
