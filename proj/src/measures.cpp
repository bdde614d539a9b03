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

#include "qfb/measures.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "qfb/errors.hpp"

namespace qfb {

namespace {

// Eigenvalues of rho below this are treated as exact zeros before the square
// root; sqrt amplifies their roundoff (~1e-16) to ~1e-8.
constexpr double kRankCutoff = 1e-14;

OperatorMatrix hermitian_part(const OperatorMatrix& m) { return 0.5 * (m + m.adjoint()); }

const std::array<Matrix2, 3>& paulis() {
  static const std::array<Matrix2, 3> p = {pauli(Axis::x), pauli(Axis::y), pauli(Axis::z)};
  return p;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

}  // namespace

double concurrence(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> eig(hermitian_part(rho.matrix()));
  if (eig.info() != Eigen::Success) throw NumericError("concurrence: eigen-solver failed");

  // rho = W W^dag; the singular values of W^T (sy sy) W are the square roots
  // of the eigenvalues of rho * (sy sy) rho^* (sy sy).
  Eigen::Vector4d weight;
  for (int k = 0; k < 4; ++k) {
    const double p = eig.eigenvalues()(k);
    weight(k) = p > kRankCutoff ? std::sqrt(p) : 0.0;
  }
  const OperatorMatrix w = eig.eigenvectors() * weight.asDiagonal();
  const OperatorMatrix flip = tensor(pauli(Axis::y), pauli(Axis::y));
  const OperatorMatrix m = w.transpose() * flip * w;

  Eigen::JacobiSVD<OperatorMatrix> svd(m);
  const Eigen::Vector4d s = svd.singularValues();  // descending
  const double c = s(0) - s(1) - s(2) - s(3);
  return std::clamp(c, 0.0, 1.0);
}

double concurrence_sym_x(const SymXState& s) {
  const double ra = std::sqrt(std::max(s.a, 0.0));
  const double rb = std::sqrt(std::max(s.b, 0.0));
  const double outer = 1.0 - (ra + rb) * (ra + rb);
  const double corner = 2.0 * std::abs(s.e) + s.a + s.b - 1.0;
  return std::max({0.0, outer, corner});
}

OperatorMatrix BlochForm::reconstruct() const {
  const auto& p = paulis();
  const Matrix2 id = Matrix2::Identity();
  OperatorMatrix m = tensor(id, id);
  for (int i = 0; i < 3; ++i) {
    m += x(i) * tensor(p[i], id) + y(i) * tensor(id, p[i]);
    for (int j = 0; j < 3; ++j) m += t(i, j) * tensor(p[i], p[j]);
  }
  return 0.25 * m;
}

BlochForm bloch_decompose(const DensityMatrix& rho) {
  const auto& p = paulis();
  const Matrix2 id = Matrix2::Identity();
  const OperatorMatrix& m = rho.matrix();
  BlochForm f;
  for (int i = 0; i < 3; ++i) {
    f.x(i) = (m * tensor(p[i], id)).trace().real();
    f.y(i) = (m * tensor(id, p[i])).trace().real();
    for (int j = 0; j < 3; ++j) f.t(i, j) = (m * tensor(p[i], p[j])).trace().real();
  }
  return f;
}

double gmqd(const DensityMatrix& rho, MeasuredAtom side) {
  const BlochForm f = bloch_decompose(rho);
  const Eigen::Vector3d& local = side == MeasuredAtom::first ? f.x : f.y;
  const Eigen::Matrix3d t = side == MeasuredAtom::first ? f.t : Eigen::Matrix3d(f.t.transpose());
  const Eigen::Matrix3d k = local * local.transpose() + t * t.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(k, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericError("gmqd: eigen-solver failed");
  const double d = 0.25 * (local.squaredNorm() + t.squaredNorm() - eig.eigenvalues()(2));
  return std::max(d, 0.0);
}

double gmqd_sym_x(const SymXState& s) {
  const double sum = s.a + s.b;
  const double plus = -1.0 + sum + 2.0 * s.e;
  const double minus = -1.0 + sum - 2.0 * s.e;
  const double shared = (s.a - s.b) * (s.a - s.b) + (2.0 * sum - 1.0) * (2.0 * sum - 1.0);
  const double d1 = plus * plus + minus * minus;
  const double d2 = shared + minus * minus;
  const double d3 = shared + plus * plus;
  return std::min({d1, d2, d3}) / 4.0;
}

OperatorMatrix partial_transpose(const OperatorMatrix& rho) {
  OperatorMatrix out;
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) {
      out.block<2, 2>(2 * i, 2 * k) = rho.block<2, 2>(2 * i, 2 * k).transpose();
    }
  }
  return out;
}

bool ppt_separable(const DensityMatrix& rho) {
  const OperatorMatrix pt = hermitian_part(partial_transpose(rho.matrix()));
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> eig(pt, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericError("ppt_separable: eigen-solver failed");
  return eig.eigenvalues()(0) >= -1e-10;
}

std::vector<Interval> esd_windows(std::span<const double> times, std::span<const double> series,
                                  double zero_tol) {
  if (times.size() != series.size()) throw UsageError("esd_windows: series length mismatch");
  if (!(zero_tol > 0.0)) throw UsageError("esd_windows: zero_tol must be positive");
  std::vector<Interval> out;
  std::size_t i = 0;
  while (i < series.size()) {
    if (series[i] > zero_tol) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < series.size() && series[j + 1] <= zero_tol) ++j;
    if (j > i) out.push_back({times[i], times[j]});
    i = j + 1;
  }
  return out;
}

std::vector<double> sudden_change_points(std::span<const double> times,
                                         std::span<const double> series,
                                         const KinkOptions& options) {
  const std::size_t n = series.size();
  if (times.size() != n) throw UsageError("sudden_change_points: series length mismatch");
  if (n < 3) throw UsageError("sudden_change_points: need at least 3 samples");
  const double dt = times[1] - times[0];
  if (!(dt > 0.0)) throw UsageError("sudden_change_points: times must increase");
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs((times[i] - times[i - 1]) - dt) > 1e-6 * dt) {
      throw UsageError("sudden_change_points: time grid is not uniform");
    }
  }
  if (options.threshold && !(*options.threshold > 0.0)) {
    throw UsageError("sudden_change_points: kink threshold must be positive");
  }

  std::vector<double> step(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) step[i] = std::abs(series[i + 1] - series[i]);
  std::vector<double> curvature(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    curvature[i] = std::abs(series[i + 1] - 2.0 * series[i] + series[i - 1]) / dt;
  }
  const double max_slope = *std::max_element(step.begin(), step.end()) / dt;
  const double floor = 1e-6 * std::max(1.0, max_slope);

  const auto window = static_cast<std::ptrdiff_t>(std::max(options.window, 3));
  auto neighbourhood = [&](const std::vector<double>& v, std::ptrdiff_t i, std::ptrdiff_t lo_idx,
                           std::ptrdiff_t hi_idx) {
    std::vector<double> vals;
    const std::ptrdiff_t lo = std::max(lo_idx, i - window);
    const std::ptrdiff_t hi = std::min(hi_idx, i + window);
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      if (std::abs(j - i) > 2) vals.push_back(v[static_cast<std::size_t>(j)]);
    }
    return median(std::move(vals));
  };

  std::vector<std::size_t> flagged;
  const auto last = static_cast<std::ptrdiff_t>(n) - 2;
  for (std::ptrdiff_t i = 1; i <= last; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const double k = curvature[u];
    const bool spike = options.threshold
                           ? k > *options.threshold
                           : k > options.local_factor * neighbourhood(curvature, i, 1, last) + floor;
    if (!spike) continue;

    const double local_step = neighbourhood(step, i, 0, static_cast<std::ptrdiff_t>(n) - 2);
    const double jump_limit = options.jump_factor * local_step + floor * dt;
    if (step[u - 1] > jump_limit || step[u] > jump_limit) continue;

    const double lowest =
        std::min({std::abs(series[u - 1]), std::abs(series[u]), std::abs(series[u + 1])});
    if (options.skip_zero_touches && lowest <= options.zero_tol + 2.0 * std::max(step[u - 1], step[u])) continue;
    flagged.push_back(u);
  }

  std::vector<double> points;
  for (std::size_t k = 0; k < flagged.size();) {
    std::size_t m = k;
    while (m + 1 < flagged.size() && flagged[m + 1] - flagged[m] <= 2) ++m;
    points.push_back(0.5 * (times[flagged[k]] + times[flagged[m]]));
    k = m + 1;
  }
  return points;
}

FeatureReport analyze_features(std::span<const double> times,
                               std::span<const double> concurrence_series,
                               std::span<const double> gmqd_series) {
  if (concurrence_series.size() != times.size() || gmqd_series.size() != times.size()) {
    throw UsageError("analyze_features: series length mismatch");
  }
  FeatureReport r;
  if (times.empty()) return r;
  r.esd_windows = esd_windows(times, concurrence_series);
  if (times.size() >= 3) {
    r.sudden_change_times = sudden_change_points(times, concurrence_series);
    r.gmqd_sudden_change_times = sudden_change_points(times, gmqd_series);
  }
  r.steady_concurrence = concurrence_series.back();
  r.steady_gmqd = gmqd_series.back();
  return r;
}

}  // namespace qfb
