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

// Scenario configuration, trajectory tables and the per-figure runners
// behind the command-line tool.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qfb/dynamics.hpp"
#include "qfb/measures.hpp"
#include "qfb/operators.hpp"

namespace qfb {

enum class OutputFormat { csv, json };

struct ScenarioConfig {
  InitialState initial_state = InitialState::ee;
  ModelParams params{};
  double dt = 1e-3;
  double t_max = 10.0;
  int stride = 10;
  std::filesystem::path output_path = "trajectory.csv";
  OutputFormat format = OutputFormat::csv;

  /// Throws UsageError naming the offending field.  Stricter than
  /// ModelParams::validate: eta >= 0.01, dt in (0, 0.1], t_max <= 1000.
  void validate() const;
};

inline constexpr double kMinCliEfficiency = 0.01;

/// Applies one `key = value` setting; keys match the long CLI flags without
/// the leading dashes (initial-state, model, eta, omega, lambda, mu, gamma,
/// dt, t-max, stride, format, out).  Throws UsageError.
void apply_setting(ScenarioConfig& config, std::string_view key, std::string_view value);

/// Flat key-value text, one `key = value` per line, '#' starts a comment.
ScenarioConfig parse_config_text(std::string_view text, ScenarioConfig base = {});
ScenarioConfig load_config_file(const std::filesystem::path& path, ScenarioConfig base = {});

std::string config_json(const ScenarioConfig& config);

/// CSV header of every trajectory file.
inline constexpr std::string_view kTrajectoryHeader =
    "t,a,b,c,e,concurrence,gmqd,gmqd_side2,trace_error,min_eigenvalue";

struct SampleRow {
  double t;
  std::optional<SymXState> sym_x;  ///< empty when the state left the X form
  double concurrence;
  double gmqd;
  double gmqd_side2;
  double trace_error;
  double min_eigenvalue;
  bool separable;
};

struct ScenarioResult {
  ScenarioConfig config;
  Trajectory trajectory;
  std::vector<SampleRow> rows;
  FeatureReport features;
};

/// Integrates and measures; no I/O.
ScenarioResult simulate(const ScenarioConfig& config);

/// 12 significant digits, fixed layout.
std::string format_number(double v);
std::string trajectory_csv(const ScenarioResult& result);
std::string trajectory_json(const ScenarioResult& result);
std::string feature_report_json(const FeatureReport& features);

struct ScenarioOutputs {
  std::filesystem::path trajectory;
  std::filesystem::path report;
};

/// Writes the trajectory table to config.output_path and the feature report
/// next to it (`<stem>.report.json`).  Throws IoError.
ScenarioOutputs run_scenario(const ScenarioConfig& config);

enum class FigureId { fig2a, fig2b, fig2c, fig3, fig4a, fig4b, fig4c, fig4d };

std::string_view to_string(FigureId id);
/// Accepts "2a", "3", "4d", ...; throws UsageError.
FigureId parse_figure_id(std::string_view text);

struct FigureCurve {
  std::string label;  ///< eta1, eta0.5, eta0.1, nofeedback
  ScenarioConfig config;
};

struct FigureOptions {
  double t_max = 10.0;
  double dt = 1e-3;
  int stride = 10;
};

/// The curves one figure consists of, output paths relative to out_dir.
std::vector<FigureCurve> figure_curves(FigureId id, const std::filesystem::path& out_dir,
                                       const FigureOptions& options = {});

/// Columns of the (a, b, e) wedge files.
inline constexpr std::string_view kWedgeHeader = "t,a,b,e,separable";
std::string wedge_csv(const ScenarioResult& result);

/// Writes one data file plus a sidecar JSON per curve; returns the data files.
std::vector<std::filesystem::path> run_figure(FigureId id, const std::filesystem::path& out_dir,
                                              const FigureOptions& options = {});

}  // namespace qfb
