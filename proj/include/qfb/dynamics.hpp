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

#pragma once

// Master equations for two collectively damped atoms with and without
// homodyne-mediated Markovian feedback, and a fixed-step RK4 integrator.

#include <functional>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

#include "qfb/operators.hpp"

namespace qfb {

enum class ModelKind {
  dicke,                 ///< -i[H, rho] + D[A] rho
  feedback,              ///< ideal homodyne feedback
  feedback_inefficient,  ///< feedback with detection efficiency eta
};

std::string_view to_string(ModelKind m);
/// Throws UsageError for unknown names.
ModelKind parse_model_kind(std::string_view name);

/// How the homodyne photocurrent enters the feedback master equation.
///
/// The measured channel is c = exp(i * quadrature_phase) * A and the applied
/// feedback Hamiltonian is current_scale * F.  The defaults are the
/// convention under which the analytic |ee> and |gg> solutions hold
/// exactly; they are exposed so other conventions can be explored.
struct HomodyneCoupling {
  double quadrature_phase = -std::numbers::pi / 2.0;
  double current_scale = 0.5;
};

struct ModelParams {
  ModelKind model = ModelKind::feedback_inefficient;
  double omega = 0.0;       ///< Rabi frequency, units of Gamma
  double gain = 1.0;        ///< lambda
  double mixing = 1.0;      ///< mu
  double efficiency = 1.0;  ///< eta in (0, 1]
  double gamma = 1.0;       ///< collective decay rate
  HomodyneCoupling coupling{};
  /// Replaces feedback_operator(gain, mixing) when set.
  std::optional<OperatorMatrix> feedback_override{};

  /// Throws ParameterError.
  void validate() const;
};

/// X rho X^dag - (X^dag X rho + rho X^dag X) / 2.
OperatorMatrix dissipator(const OperatorMatrix& x, const OperatorMatrix& rho);
OperatorMatrix dissipator(const OperatorMatrix& x, const DensityMatrix& rho);

/// Generator of one model, assembled once and applied many times.
///
/// Stored as d rho/dt = -i (K rho - rho K^dag) + sum_k L_k rho L_k^dag with
/// K = H_total - (i/2) sum_k L_k^dag L_k.
class MasterEquation {
 public:
  explicit MasterEquation(const ModelParams& params);

  OperatorMatrix apply(const OperatorMatrix& rho) const;

  const OperatorMatrix& hamiltonian() const noexcept { return hamiltonian_; }
  const std::vector<OperatorMatrix>& jump_operators() const noexcept { return jumps_; }

 private:
  OperatorMatrix hamiltonian_;
  OperatorMatrix effective_;
  std::vector<OperatorMatrix> jumps_;
};

OperatorMatrix rhs(const ModelParams& params, const DensityMatrix& rho);

/// One classical RK4 step followed by taking the Hermitian part.
/// Throws ParameterError for dt <= 0.
DensityMatrix rk4_step(const ModelParams& params, const DensityMatrix& rho, double dt);
OperatorMatrix rk4_step(const MasterEquation& eq, const OperatorMatrix& rho, double dt);

struct Trajectory {
  double dt = 0.0;
  int stride = 1;
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  std::vector<double> trace_error;
  std::vector<double> min_eigenvalue;

  std::size_t size() const noexcept { return times.size(); }
  double max_trace_error() const;
  double lowest_eigenvalue() const;
};

struct DivergenceLimits {
  double trace_error = 1e-6;
  double min_eigenvalue = -1e-5;
};

/// Integrates round(t_max / dt) steps, sampling every `stride` steps
/// (sample k sits at t = k * stride * dt).  Throws IntegrationDiverged when a
/// sample breaches `limits`.
Trajectory evolve(const DensityMatrix& rho0, const ModelParams& params, double dt, double t_max,
                  int stride = 1, const DivergenceLimits& limits = {});

/// Called with every integration step, sampled or not, starting at t = 0.
using StepObserver = std::function<void(double t, const DensityMatrix& rho)>;

Trajectory evolve(const DensityMatrix& rho0, const ModelParams& params, double dt, double t_max,
                  int stride, const DivergenceLimits& limits, const StepObserver& observe);

struct SteadyState {
  DensityMatrix state;
  double time;      ///< time at which the residual first fell below tol
  double residual;  ///< max |rhs(state)_ij|
};

/// Long-time integration until max |rhs_ij| < tol.  Throws SteadyStateTimeout.
SteadyState steady_state(const DensityMatrix& rho0, const ModelParams& params, double tol = 1e-10,
                         double t_cap = 50.0, double dt = 1e-3);

}  // namespace qfb
