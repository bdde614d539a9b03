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

#include "qfb/operators.hpp"

#include <cmath>
#include <string>

#include "qfb/errors.hpp"

namespace qfb {

namespace {

constexpr Complex kI{0.0, 1.0};

Matrix2 identity2() { return Matrix2::Identity(); }

OperatorMatrix sum_over_atoms(const Matrix2& op) {
  return tensor(op, identity2()) + tensor(identity2(), op);
}

}  // namespace

Matrix2 pauli(Axis axis) {
  Matrix2 m;
  switch (axis) {
    case Axis::x:
      m << 0.0, 1.0, 1.0, 0.0;
      break;
    case Axis::y:
      m << 0.0, -kI, kI, 0.0;
      break;
    case Axis::z:
      m << 1.0, 0.0, 0.0, -1.0;
      break;
  }
  return m;
}

Matrix2 lowering() {
  Matrix2 m;
  m << 0.0, 1.0, 0.0, 0.0;
  return m;
}

OperatorMatrix tensor(const Matrix2& left, const Matrix2& right) {
  if (!left.allFinite() || !right.allFinite()) {
    throw ParameterError("tensor: non-finite factor");
  }
  OperatorMatrix out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out.block<2, 2>(2 * i, 2 * j) = left(i, j) * right;
    }
  }
  return out;
}

OperatorMatrix collective_lowering(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ParameterError("collective_lowering: gamma must be positive, got " + std::to_string(gamma));
  }
  return gamma * sum_over_atoms(lowering());
}

OperatorMatrix feedback_operator(double gain, double mixing) {
  if (!std::isfinite(gain) || !std::isfinite(mixing)) {
    throw ParameterError("feedback_operator: gain and mixing must be finite");
  }
  const Matrix2 sx = pauli(Axis::x);
  const Matrix2 sz = pauli(Axis::z);
  const OperatorMatrix cross = tensor(sx, sz) + tensor(sz, sx);
  return -gain * (mixing * cross + sum_over_atoms(sx));
}

OperatorMatrix drive_hamiltonian(double omega) {
  if (!std::isfinite(omega)) {
    throw ParameterError("drive_hamiltonian: omega must be finite");
  }
  return omega * sum_over_atoms(pauli(Axis::x));
}

bool is_finite(const OperatorMatrix& m) { return m.allFinite(); }

double max_abs(const OperatorMatrix& m) { return m.cwiseAbs().maxCoeff(); }

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix DensityMatrix::from_matrix(const OperatorMatrix& m, const DensityTolerances& tol) {
  if (!m.allFinite()) {
    throw ValidationError("density matrix has non-finite entries");
  }
  DensityMatrix rho(m);
  if (const double h = rho.hermiticity_error(); h > tol.hermitian) {
    throw ValidationError("density matrix not Hermitian (deviation " + std::to_string(h) + ")");
  }
  if (const double t = rho.trace_error(); t > tol.trace) {
    throw ValidationError("density matrix trace differs from 1 by " + std::to_string(t));
  }
  if (const double l = rho.min_eigenvalue(); l < tol.min_eigenvalue) {
    throw ValidationError("density matrix not positive semidefinite (min eigenvalue " +
                          std::to_string(l) + ")");
  }
  return rho;
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0) || !psi.allFinite()) {
    throw ValidationError("pure state must be a finite nonzero vector");
  }
  const StateVector v = psi / norm;
  return DensityMatrix(v * v.adjoint());
}

double DensityMatrix::trace_error() const { return std::abs(rho_.trace() - 1.0); }

double DensityMatrix::hermiticity_error() const { return max_abs(rho_ - rho_.adjoint()); }

double DensityMatrix::min_eigenvalue() const {
  const OperatorMatrix h = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigenvalue solver failed");
  }
  return solver.eigenvalues()(0);
}

double DensityMatrix::purity() const { return (rho_ * rho_).trace().real(); }

// ---------------------------------------------------------------------------
// SymXState

bool SymXState::is_valid(double slack) const noexcept {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(e)) return false;
  if (a < -slack || a > 1.0 + slack) return false;
  if (b < -slack || b > 1.0 + slack) return false;
  if (a + b > 1.0 + slack) return false;
  return e * e <= a * b + slack;
}

SymXState SymXState::make(double a, double b, double e, double slack) {
  SymXState s{a, b, e};
  if (!s.is_valid(slack)) {
    throw ValidationError("invalid X-form parameters (a=" + std::to_string(a) +
                          ", b=" + std::to_string(b) + ", e=" + std::to_string(e) + ")");
  }
  return s;
}

DensityMatrix density_from_sym_x(const SymXState& s) {
  if (!s.is_valid()) {
    throw ValidationError("density_from_sym_x: parameters violate X-form invariants");
  }
  const double c = s.c();
  OperatorMatrix m = OperatorMatrix::Zero();
  m(basis::gg, basis::gg) = s.a;
  m(basis::ee, basis::ee) = s.b;
  m(basis::gg, basis::ee) = s.e;
  m(basis::ee, basis::gg) = s.e;
  m.block<2, 2>(1, 1).setConstant(c);
  return DensityMatrix::from_matrix_unchecked(m);
}

std::optional<SymXState> try_sym_x_from_density(const DensityMatrix& rho, double tol) {
  const OperatorMatrix& m = rho.matrix();
  // Entries that must vanish: corners against the middle block.
  for (int r : {basis::gg, basis::ee}) {
    for (int c : {basis::ge, basis::eg}) {
      if (std::abs(m(r, c)) > tol || std::abs(m(c, r)) > tol) return std::nullopt;
    }
  }
  const Complex mid = m(basis::ge, basis::ge);
  for (int r : {basis::ge, basis::eg}) {
    for (int c : {basis::ge, basis::eg}) {
      if (std::abs(m(r, c) - mid) > tol) return std::nullopt;
    }
  }
  if (std::abs(mid.imag()) > tol) return std::nullopt;
  const Complex corner = m(basis::gg, basis::ee);
  if (std::abs(corner.imag()) > tol || std::abs(m(basis::ee, basis::gg) - std::conj(corner)) > tol ||
      std::abs(m(basis::ee, basis::gg) - corner) > tol) {
    return std::nullopt;
  }
  SymXState s{m(basis::gg, basis::gg).real(), m(basis::ee, basis::ee).real(), corner.real()};
  if (std::abs(s.c() - mid.real()) > tol) return std::nullopt;
  if (!s.is_valid(tol)) return std::nullopt;
  return s;
}

SymXState sym_x_from_density(const DensityMatrix& rho, double tol) {
  if (auto s = try_sym_x_from_density(rho, tol)) return *s;
  throw NotSymXForm("density matrix is not of the symmetric X form");
}

// ---------------------------------------------------------------------------
// Named initial states

namespace {

struct NamedState {
  InitialState id;
  std::string_view name;
};

constexpr std::array<NamedState, 7> kNames = {{{InitialState::ee, "ee"},
                                               {InitialState::gg, "gg"},
                                               {InitialState::eg, "eg"},
                                               {InitialState::eg_plus, "eg_plus"},
                                               {InitialState::eg_minus, "eg_minus"},
                                               {InitialState::eegg_plus, "eegg_plus"},
                                               {InitialState::eegg_minus, "eegg_minus"}}};

}  // namespace

std::string_view to_string(InitialState s) {
  for (const auto& n : kNames) {
    if (n.id == s) return n.name;
  }
  return "unknown";
}

InitialState parse_initial_state(std::string_view name) {
  for (const auto& n : kNames) {
    if (n.name == name) return n.id;
  }
  throw UsageError("unknown initial state '" + std::string(name) +
                   "' (expected ee, gg, eg, eg_plus, eg_minus, eegg_plus, eegg_minus)");
}

StateVector initial_ket(InitialState s) {
  StateVector v = StateVector::Zero();
  const double h = 1.0 / std::sqrt(2.0);
  switch (s) {
    case InitialState::ee:
      v(basis::ee) = 1.0;
      break;
    case InitialState::gg:
      v(basis::gg) = 1.0;
      break;
    case InitialState::eg:
      v(basis::eg) = 1.0;
      break;
    case InitialState::eg_plus:
      v(basis::eg) = h;
      v(basis::ge) = h;
      break;
    case InitialState::eg_minus:
      v(basis::eg) = h;
      v(basis::ge) = -h;
      break;
    case InitialState::eegg_plus:
      v(basis::ee) = h;
      v(basis::gg) = h;
      break;
    case InitialState::eegg_minus:
      v(basis::ee) = h;
      v(basis::gg) = -h;
      break;
  }
  return v;
}

DensityMatrix initial_state(InitialState s) {
  const StateVector v = initial_ket(s);
  return DensityMatrix::from_matrix_unchecked(v * v.adjoint());
}

DensityMatrix initial_state(std::string_view name) { return initial_state(parse_initial_state(name)); }

DensityMatrix swap_atoms(const DensityMatrix& rho) {
  OperatorMatrix p = OperatorMatrix::Zero();
  p(basis::gg, basis::gg) = 1.0;
  p(basis::ee, basis::ee) = 1.0;
  p(basis::ge, basis::eg) = 1.0;
  p(basis::eg, basis::ge) = 1.0;
  return DensityMatrix::from_matrix_unchecked(p * rho.matrix() * p);
}

}  // namespace qfb
