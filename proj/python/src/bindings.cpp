// Copyright 2026 The qfeedback Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <vector>

#include "qfb/analytic.hpp"
#include "qfb/dynamics.hpp"
#include "qfb/errors.hpp"
#include "qfb/measures.hpp"
#include "qfb/operators.hpp"
#include "qfb/scenario.hpp"
#include "qfb/verify.hpp"

namespace py = pybind11;
using namespace qfb;

namespace {

DensityMatrix density(const OperatorMatrix& m) { return DensityMatrix::from_matrix(m); }

ModelParams make_params(const std::string& model, double eta, double omega, double lam, double mu,
                        double gamma) {
  ModelParams p;
  p.model = parse_model_kind(model);
  p.efficiency = eta;
  p.omega = omega;
  p.gain = lam;
  p.mixing = mu;
  p.gamma = gamma;
  p.validate();
  return p;
}

py::dict features_dict(const FeatureReport& f) {
  py::list windows;
  for (const auto& w : f.esd_windows) windows.append(py::make_tuple(w.start, w.end));
  py::dict d;
  d["esd_windows"] = windows;
  d["sudden_change_times"] = f.sudden_change_times;
  d["gmqd_sudden_change_times"] = f.gmqd_sudden_change_times;
  d["steady_concurrence"] = f.steady_concurrence;
  d["steady_gmqd"] = f.steady_gmqd;
  return d;
}

ScenarioConfig config_from_kwargs(const py::kwargs& kwargs) {
  ScenarioConfig c;
  for (const auto& [key, value] : kwargs) {
    apply_setting(c, std::string(py::str(key)), std::string(py::str(value)));
  }
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-atom homodyne feedback dynamics";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<NotSymXForm>(m, "NotSymXForm", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<UsageError>(m, "UsageError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  auto numeric = py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<IntegrationDiverged>(m, "IntegrationDiverged", numeric.ptr());
  py::register_exception<SteadyStateTimeout>(m, "SteadyStateTimeout", numeric.ptr());

  std::vector<std::string> names;
  for (InitialState s : kAllInitialStates) names.emplace_back(to_string(s));
  m.attr("INITIAL_STATES") = names;
  m.attr("TRAJECTORY_HEADER") = std::string(kTrajectoryHeader);

  // operators
  m.def("pauli", [](const std::string& axis) {
    if (axis == "x") return pauli(Axis::x);
    if (axis == "y") return pauli(Axis::y);
    if (axis == "z") return pauli(Axis::z);
    throw UsageError("axis must be x, y or z");
  }, py::arg("axis"));
  m.def("collective_lowering", &collective_lowering, py::arg("gamma") = 1.0);
  m.def("feedback_operator", &feedback_operator, py::arg("gain") = 1.0, py::arg("mixing") = 1.0);
  m.def("drive_hamiltonian", &drive_hamiltonian, py::arg("omega"));
  m.def("initial_state", [](const std::string& name) { return initial_state(name).matrix(); },
        py::arg("name"));
  m.def("density_from_sym_x",
        [](double a, double b, double e) { return density_from_sym_x({a, b, e}).matrix(); },
        py::arg("a"), py::arg("b"), py::arg("e"));
  m.def("sym_x_from_density", [](const OperatorMatrix& rho, double tol) {
    const SymXState s = sym_x_from_density(density(rho), tol);
    return py::make_tuple(s.a, s.b, s.e);
  }, py::arg("rho"), py::arg("tol") = 1e-9);

  // dynamics
  m.def("rhs", [](const OperatorMatrix& rho, const std::string& model, double eta, double omega,
                  double lam, double mu, double gamma) {
    return rhs(make_params(model, eta, omega, lam, mu, gamma), density(rho));
  }, py::arg("rho"), py::arg("model") = "feedback_inefficient", py::arg("eta") = 1.0,
     py::arg("omega") = 0.0, py::arg("lam") = 1.0, py::arg("mu") = 1.0, py::arg("gamma") = 1.0);
  m.def("evolve", [](const OperatorMatrix& rho0, double t_max, double dt, int stride,
                     const std::string& model, double eta, double omega, double lam, double mu,
                     double gamma) {
    const Trajectory t =
        evolve(density(rho0), make_params(model, eta, omega, lam, mu, gamma), dt, t_max, stride);
    std::vector<OperatorMatrix> states;
    states.reserve(t.size());
    for (const auto& s : t.states) states.push_back(s.matrix());
    return py::make_tuple(t.times, states);
  }, py::arg("rho0"), py::arg("t_max"), py::arg("dt") = 1e-3, py::arg("stride") = 1,
     py::arg("model") = "feedback_inefficient", py::arg("eta") = 1.0, py::arg("omega") = 0.0,
     py::arg("lam") = 1.0, py::arg("mu") = 1.0, py::arg("gamma") = 1.0,
     "Returns (times, states) sampled every stride steps.");
  m.def("steady_state", [](const OperatorMatrix& rho0, const std::string& model, double eta,
                           double tol, double t_cap) {
    const SteadyState s = steady_state(density(rho0), make_params(model, eta, 0.0, 1.0, 1.0, 1.0), tol, t_cap);
    return py::make_tuple(s.state.matrix(), s.time, s.residual);
  }, py::arg("rho0"), py::arg("model") = "feedback_inefficient", py::arg("eta") = 1.0,
     py::arg("tol") = 1e-10, py::arg("t_cap") = 50.0);

  // analytic
  auto tuple = [](const SymXState& s) { return py::make_tuple(s.a, s.b, s.e); };
  m.def("ee_closed_form", [tuple](double t, double eta) { return tuple(analytic::ee_closed_form(t, eta)); },
        py::arg("t"), py::arg("eta"));
  m.def("gg_closed_form", [tuple](double t, double eta) { return tuple(analytic::gg_closed_form(t, eta)); },
        py::arg("t"), py::arg("eta"));
  m.def("steady_concurrence", &analytic::steady_concurrence, py::arg("eta"));
  m.def("eegg_minus_concurrence", &analytic::eegg_minus_concurrence, py::arg("t"));

  // measures
  m.def("concurrence", [](const OperatorMatrix& rho) { return concurrence(density(rho)); }, py::arg("rho"));
  m.def("concurrence_sym_x", [](double a, double b, double e) { return concurrence_sym_x({a, b, e}); },
        py::arg("a"), py::arg("b"), py::arg("e"));
  m.def("gmqd", [](const OperatorMatrix& rho, int side) {
    if (side != 1 && side != 2) throw UsageError("side must be 1 or 2");
    return gmqd(density(rho), side == 1 ? MeasuredAtom::first : MeasuredAtom::second);
  }, py::arg("rho"), py::arg("side") = 1);
  m.def("gmqd_sym_x", [](double a, double b, double e) { return gmqd_sym_x({a, b, e}); },
        py::arg("a"), py::arg("b"), py::arg("e"));
  m.def("ppt_separable", [](const OperatorMatrix& rho) { return ppt_separable(density(rho)); },
        py::arg("rho"));
  m.def("esd_windows", [](const std::vector<double>& t, const std::vector<double>& c, double zero_tol) {
    std::vector<std::pair<double, double>> out;
    for (const auto& w : esd_windows(t, c, zero_tol)) out.emplace_back(w.start, w.end);
    return out;
  }, py::arg("times"), py::arg("series"), py::arg("zero_tol") = 1e-6);
  m.def("sudden_change_points", [](const std::vector<double>& t, const std::vector<double>& s,
                                   std::optional<double> threshold, bool skip_zero_touches) {
    KinkOptions o;
    o.threshold = threshold;
    o.skip_zero_touches = skip_zero_touches;
    return sudden_change_points(t, s, o);
  }, py::arg("times"), py::arg("series"), py::arg("threshold") = py::none(),
     py::arg("skip_zero_touches") = true);

  // scenarios
  m.def("simulate", [](const py::kwargs& kwargs) {
    const ScenarioResult r = simulate(config_from_kwargs(kwargs));
    py::dict out;
    out["csv"] = trajectory_csv(r);
    out["features"] = features_dict(r.features);
    return out;
  }, "Runs one scenario; keyword names match the CLI flags (initial_state, model, eta, ...).");
  m.def("run_scenario", [](const py::kwargs& kwargs) {
    const ScenarioOutputs o = run_scenario(config_from_kwargs(kwargs));
    return py::make_tuple(o.trajectory, o.report);
  });
  m.def("run_figure", [](const std::string& id, const std::filesystem::path& out_dir, double t_max,
                         double dt, int stride) {
    return run_figure(parse_figure_id(id), out_dir, FigureOptions{t_max, dt, stride});
  }, py::arg("fig_id"), py::arg("out_dir"), py::arg("t_max") = 10.0, py::arg("dt") = 1e-3,
     py::arg("stride") = 10);
  m.def("verify", [](double oracle_dt, bool inject_fault) {
    VerifyOptions o;
    o.oracle_dt = oracle_dt;
    o.inject_feedback_fault = inject_fault;
    VerifyReport r;
    {
      py::gil_scoped_release release;
      r = run_verification(o);
    }
    return py::make_tuple(r.passed(), verification_summary(r));
  }, py::arg("oracle_dt") = 1e-4, py::arg("inject_fault") = false,
     "Runs the acceptance suite; returns (passed, summary).");
}
