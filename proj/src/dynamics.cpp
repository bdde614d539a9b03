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

#include "qfb/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "qfb/errors.hpp"

namespace qfb {

namespace {

constexpr Complex kI{0.0, 1.0};

struct ModelName {
  ModelKind kind;
  std::string_view name;
};

constexpr ModelName kModelNames[] = {{ModelKind::dicke, "dicke"},
                                     {ModelKind::feedback, "feedback"},
                                     {ModelKind::feedback_inefficient, "feedback_inefficient"}};

}  // namespace

std::string_view to_string(ModelKind m) {
  for (const auto& n : kModelNames) {
    if (n.kind == m) return n.name;
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  for (const auto& n : kModelNames) {
    if (n.name == name) return n.kind;
  }
  throw UsageError("unknown model '" + std::string(name) +
                   "' (expected dicke, feedback, feedback_inefficient)");
}

void ModelParams::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(omega) || !finite(gain) || !finite(mixing)) {
    throw ParameterError("omega, lambda and mu must be finite");
  }
  if (!(gamma > 0.0) || !finite(gamma)) {
    throw ParameterError("gamma must be positive");
  }
  if (!(efficiency > 0.0 && efficiency <= 1.0)) {
    throw ParameterError("eta must lie in (0, 1], got " + std::to_string(efficiency));
  }
  if (!finite(coupling.quadrature_phase) || !finite(coupling.current_scale)) {
    throw ParameterError("homodyne coupling must be finite");
  }
  if (feedback_override && !feedback_override->allFinite()) {
    throw ParameterError("feedback override has non-finite entries");
  }
}

OperatorMatrix dissipator(const OperatorMatrix& x, const OperatorMatrix& rho) {
  const OperatorMatrix xdx = x.adjoint() * x;
  return x * rho * x.adjoint() - 0.5 * (xdx * rho + rho * xdx);
}

OperatorMatrix dissipator(const OperatorMatrix& x, const DensityMatrix& rho) {
  return dissipator(x, rho.matrix());
}

MasterEquation::MasterEquation(const ModelParams& params) {
  params.validate();
  const OperatorMatrix a = collective_lowering(params.gamma);
  hamiltonian_ = drive_hamiltonian(params.omega);

  if (params.model == ModelKind::dicke) {
    jumps_.push_back(a);
  } else {
    const OperatorMatrix f = params.coupling.current_scale *
                             (params.feedback_override ? *params.feedback_override
                                                       : feedback_operator(params.gain, params.mixing));
    const OperatorMatrix c = std::polar(1.0, params.coupling.quadrature_phase) * a;
    hamiltonian_ += 0.5 * (c.adjoint() * f + f * c);
    jumps_.push_back(c - kI * f);
    if (params.model == ModelKind::feedback_inefficient && params.efficiency < 1.0) {
      const double eta = params.efficiency;
      jumps_.push_back(std::sqrt((1.0 - eta) / eta) * f);
    }
  }

  OperatorMatrix decay = OperatorMatrix::Zero();
  for (const auto& l : jumps_) decay += l.adjoint() * l;
  effective_ = hamiltonian_ - 0.5 * kI * decay;
}

OperatorMatrix MasterEquation::apply(const OperatorMatrix& rho) const {
  OperatorMatrix out = -kI * (effective_ * rho - rho * effective_.adjoint());
  for (const auto& l : jumps_) out.noalias() += l * rho * l.adjoint();
  return out;
}

OperatorMatrix rhs(const ModelParams& params, const DensityMatrix& rho) {
  return MasterEquation(params).apply(rho.matrix());
}

OperatorMatrix rk4_step(const MasterEquation& eq, const OperatorMatrix& rho, double dt) {
  const OperatorMatrix k1 = eq.apply(rho);
  const OperatorMatrix k2 = eq.apply(rho + 0.5 * dt * k1);
  const OperatorMatrix k3 = eq.apply(rho + 0.5 * dt * k2);
  const OperatorMatrix k4 = eq.apply(rho + dt * k3);
  const OperatorMatrix next = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return 0.5 * (next + next.adjoint());
}

DensityMatrix rk4_step(const ModelParams& params, const DensityMatrix& rho, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ParameterError("rk4_step: dt must be positive");
  }
  const MasterEquation eq(params);
  return DensityMatrix::from_matrix_unchecked(rk4_step(eq, rho.matrix(), dt));
}

double Trajectory::max_trace_error() const {
  return trace_error.empty() ? 0.0 : *std::max_element(trace_error.begin(), trace_error.end());
}

double Trajectory::lowest_eigenvalue() const {
  return min_eigenvalue.empty() ? 0.0
                                : *std::min_element(min_eigenvalue.begin(), min_eigenvalue.end());
}

namespace {

long step_count(double dt, double t_max) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("dt must be positive");
  if (!(t_max >= dt) || !std::isfinite(t_max)) throw ParameterError("t_max must be at least dt");
  return std::lround(t_max / dt);
}

[[noreturn]] void diverged(const char* what, double value, double t) {
  std::ostringstream msg;
  msg << "integration diverged at t=" << t << ": " << what << " = " << value;
  throw IntegrationDiverged(msg.str(), t);
}

}  // namespace

Trajectory evolve(const DensityMatrix& rho0, const ModelParams& params, double dt, double t_max,
                  int stride, const DivergenceLimits& limits) {
  return evolve(rho0, params, dt, t_max, stride, limits, {});
}

Trajectory evolve(const DensityMatrix& rho0, const ModelParams& params, double dt, double t_max,
                  int stride, const DivergenceLimits& limits, const StepObserver& observe) {
  if (stride < 1) throw ParameterError("stride must be at least 1");
  const long steps = step_count(dt, t_max);
  const MasterEquation eq(params);

  Trajectory traj;
  traj.dt = dt;
  traj.stride = stride;
  const std::size_t samples = static_cast<std::size_t>(steps / stride) + 1;
  traj.times.reserve(samples);
  traj.states.reserve(samples);
  traj.trace_error.reserve(samples);
  traj.min_eigenvalue.reserve(samples);

  auto record = [&](long step, const OperatorMatrix& m) {
    const double t = static_cast<double>(step) * dt;
    if (!m.allFinite()) diverged("non-finite entry", 0.0, t);
    const auto rho = DensityMatrix::from_matrix_unchecked(m);
    const double terr = rho.trace_error();
    const double lmin = rho.min_eigenvalue();
    if (terr > limits.trace_error) diverged("trace error", terr, t);
    if (lmin < limits.min_eigenvalue) diverged("min eigenvalue", lmin, t);
    traj.times.push_back(t);
    traj.states.push_back(rho);
    traj.trace_error.push_back(terr);
    traj.min_eigenvalue.push_back(lmin);
  };

  OperatorMatrix rho = rho0.matrix();
  record(0, rho);
  if (observe) observe(0.0, DensityMatrix::from_matrix_unchecked(rho));
  for (long step = 1; step <= steps; ++step) {
    rho = rk4_step(eq, rho, dt);
    if (step % stride == 0) record(step, rho);
    if (observe) {
      if (!rho.allFinite()) diverged("non-finite entry", 0.0, static_cast<double>(step) * dt);
      observe(static_cast<double>(step) * dt, DensityMatrix::from_matrix_unchecked(rho));
    }
  }
  return traj;
}

SteadyState steady_state(const DensityMatrix& rho0, const ModelParams& params, double tol,
                         double t_cap, double dt) {
  if (!(tol > 0.0)) throw ParameterError("steady_state: tol must be positive");
  if (!(t_cap > 0.0)) throw ParameterError("steady_state: t_cap must be positive");
  const long steps = step_count(dt, t_cap);
  const MasterEquation eq(params);

  OperatorMatrix rho = rho0.matrix();
  double residual = max_abs(eq.apply(rho));
  for (long step = 0;; ++step) {
    if (residual < tol) {
      return {DensityMatrix::from_matrix_unchecked(rho), static_cast<double>(step) * dt, residual};
    }
    if (step == steps) break;
    rho = rk4_step(eq, rho, dt);
    if (!rho.allFinite()) {
      throw IntegrationDiverged("steady_state: non-finite state", static_cast<double>(step + 1) * dt);
    }
    residual = max_abs(eq.apply(rho));
  }
  std::ostringstream msg;
  msg << "steady state not reached by t=" << t_cap << " (residual " << residual << ")";
  throw SteadyStateTimeout(msg.str(), residual);
}

}  // namespace qfb
