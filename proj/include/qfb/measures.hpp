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

// Correlation measures for two-qubit states and detectors for features of
// their time series.

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qfb/operators.hpp"

namespace qfb {

/// Wootters concurrence.
double concurrence(const DensityMatrix& rho);
/// max[0, 1 - (sqrt a + sqrt b)^2, 2|e| + a + b - 1].
double concurrence_sym_x(const SymXState& s);

/// rho = (I + sum x_i s_i I + sum y_j I s_j + sum T_ij s_i s_j) / 4.
struct BlochForm {
  Eigen::Vector3d x;
  Eigen::Vector3d y;
  Eigen::Matrix3d t;

  OperatorMatrix reconstruct() const;
};

BlochForm bloch_decompose(const DensityMatrix& rho);

enum class MeasuredAtom { first, second };

/// Geometric quantum discord, (|x|^2 + |T|_F^2 - k_max) / 4 with k_max the
/// largest eigenvalue of x x^T + T T^T (measurement on atom 1; the roles of
/// x and y swap for atom 2).
double gmqd(const DensityMatrix& rho, MeasuredAtom side = MeasuredAtom::first);
/// min[D1, D2, D3] / 4.
double gmqd_sym_x(const SymXState& s);

OperatorMatrix partial_transpose(const OperatorMatrix& rho);
/// Partial transpose over atom 2 has min eigenvalue >= -1e-10.
bool ppt_separable(const DensityMatrix& rho);

struct Interval {
  double start;
  double end;
  double length() const noexcept { return end - start; }
};

/// Maximal runs of samples with value <= zero_tol that span at least two
/// samples.  Throws UsageError on length mismatch.
std::vector<Interval> esd_windows(std::span<const double> times, std::span<const double> series,
                                  double zero_tol = 1e-6);

struct KinkOptions {
  /// Absolute threshold on |s[i+1] - 2 s[i] + s[i-1]| / dt.  When unset the
  /// threshold is local_factor times the median over a window of
  /// neighbours.
  std::optional<double> threshold{};
  double local_factor = 50.0;
  int window = 25;
  /// Kinks where the series touches zero are entanglement sudden death
  /// boundaries, not sudden changes, and are skipped unless
  /// skip_zero_touches is false.
  bool skip_zero_touches = true;
  double zero_tol = 1e-6;
  /// A first difference this many times the local median counts as a jump.
  double jump_factor = 50.0;
};

/// Times of slope discontinuities in a continuous series on a uniform grid.
/// Throws UsageError for fewer than 3 samples, mismatched lengths or a
/// non-uniform grid.
std::vector<double> sudden_change_points(std::span<const double> times,
                                         std::span<const double> series,
                                         const KinkOptions& options = {});

struct FeatureReport {
  std::vector<Interval> esd_windows;
  std::vector<double> sudden_change_times;       ///< concurrence
  std::vector<double> gmqd_sudden_change_times;
  double steady_concurrence = 0.0;
  double steady_gmqd = 0.0;
};

FeatureReport analyze_features(std::span<const double> times,
                               std::span<const double> concurrence_series,
                               std::span<const double> gmqd_series);

}  // namespace qfb
