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

// Fixed single-atom and two-atom operators, the two-atom density matrix and
// the symmetric X-form parametrization.
//
// Two-atom basis order is {|gg>, |ge>, |eg>, |ee>}; atom 1 is the left
// Kronecker factor and the single-atom basis is {|g>, |e>}.

#include <array>
#include <complex>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

namespace qfb {

using Complex = std::complex<double>;
using Matrix2 = Eigen::Matrix2cd;
using OperatorMatrix = Eigen::Matrix4cd;
using StateVector = Eigen::Vector4cd;

namespace basis {
inline constexpr int gg = 0;
inline constexpr int ge = 1;
inline constexpr int eg = 2;
inline constexpr int ee = 3;
}  // namespace basis

enum class Axis { x, y, z };

/// Pauli matrix in the {|g>, |e>} basis.  sigma_z = |g><g| - |e><e|.
Matrix2 pauli(Axis axis);
/// sigma_- = |g><e|.
Matrix2 lowering();

/// Kronecker product, atom 1 on the left.
OperatorMatrix tensor(const Matrix2& left, const Matrix2& right);

/// Gamma * (sigma_-^(1) + sigma_-^(2)).  Throws ParameterError for gamma <= 0.
OperatorMatrix collective_lowering(double gamma);

/// -gain * [mixing * (sx sz + sz sx) + (sx I + I sx)].
OperatorMatrix feedback_operator(double gain, double mixing);

/// omega * (sx I + I sx).
OperatorMatrix drive_hamiltonian(double omega);

bool is_finite(const OperatorMatrix& m);

/// Entrywise max |m_ij|.
double max_abs(const OperatorMatrix& m);

struct DensityTolerances {
  double hermitian = 1e-12;
  double trace = 1e-10;
  double min_eigenvalue = -1e-9;
};

/// Two-atom state.  Immutable once built.
class DensityMatrix {
 public:
  /// Validates hermiticity, unit trace and positivity; throws ValidationError.
  static DensityMatrix from_matrix(const OperatorMatrix& m, const DensityTolerances& tol = {});
  /// No checks.  The integrator uses this and reports diagnostics separately.
  static DensityMatrix from_matrix_unchecked(const OperatorMatrix& m) { return DensityMatrix(m); }
  static DensityMatrix from_pure(const StateVector& psi);

  const OperatorMatrix& matrix() const noexcept { return rho_; }
  Complex operator()(int row, int col) const { return rho_(row, col); }

  double trace_error() const;
  double hermiticity_error() const;
  /// Smallest eigenvalue of the Hermitian part.
  double min_eigenvalue() const;
  double purity() const;

 private:
  explicit DensityMatrix(const OperatorMatrix& m) : rho_(m) {}
  OperatorMatrix rho_;
};

/// rho = [[a,0,0,e],[0,c,c,0],[0,c,c,0],[e,0,0,b]] with c = (1-a-b)/2.
struct SymXState {
  double a = 0.0;
  double b = 0.0;
  double e = 0.0;

  double c() const noexcept { return 0.5 * (1.0 - a - b); }

  /// Checks a, b in [0,1], a+b <= 1 and e^2 <= ab up to `slack`; throws ValidationError.
  static SymXState make(double a, double b, double e, double slack = 1e-12);
  bool is_valid(double slack = 1e-12) const noexcept;
};

DensityMatrix density_from_sym_x(const SymXState& s);

/// Inverse of density_from_sym_x; throws NotSymXForm when any entry outside
/// the X pattern exceeds tol, the middle block is not uniform, or rho_14 has
/// an imaginary part above tol.
SymXState sym_x_from_density(const DensityMatrix& rho, double tol = 1e-9);
std::optional<SymXState> try_sym_x_from_density(const DensityMatrix& rho, double tol = 1e-9);

enum class InitialState { ee, gg, eg, eg_plus, eg_minus, eegg_plus, eegg_minus };

inline constexpr std::array<InitialState, 7> kAllInitialStates = {
    InitialState::ee,      InitialState::gg,        InitialState::eg,        InitialState::eg_plus,
    InitialState::eg_minus, InitialState::eegg_plus, InitialState::eegg_minus};

std::string_view to_string(InitialState s);
/// Throws UsageError for unknown names.
InitialState parse_initial_state(std::string_view name);

StateVector initial_ket(InitialState s);
DensityMatrix initial_state(InitialState s);
DensityMatrix initial_state(std::string_view name);

/// Swaps the two atoms: P rho P with P the SWAP permutation.
DensityMatrix swap_atoms(const DensityMatrix& rho);

}  // namespace qfb
