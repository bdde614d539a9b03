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

// qfeedback: trajectories, figure data and the verification suite for two
// collectively damped atoms under homodyne feedback.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "qfb/errors.hpp"
#include "qfb/scenario.hpp"
#include "qfb/verify.hpp"

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumeric = 2, kVerification = 3 };

// Flags shared by `run`; values stay as text and are applied through the
// same path as config-file lines so both report errors identically.
struct RunFlags {
  std::string config;
  std::vector<std::pair<std::string, std::optional<std::string>>> overrides = {
      {"initial-state", {}}, {"model", {}}, {"eta", {}},    {"omega", {}}, {"lambda", {}}, {"mu", {}},
      {"gamma", {}},         {"dt", {}},    {"t-max", {}},  {"stride", {}}, {"format", {}}, {"out", {}}};
};

const char* flag_help(const std::string& key) {
  if (key == "initial-state") return "ee, gg, eg, eg_plus, eg_minus, eegg_plus, eegg_minus";
  if (key == "model") return "dicke, feedback, feedback_inefficient";
  if (key == "eta") return "detection efficiency in [0.01, 1]";
  if (key == "omega") return "Rabi frequency (units of Gamma)";
  if (key == "lambda") return "feedback gain";
  if (key == "mu") return "feedback mixing weight";
  if (key == "gamma") return "collective decay rate";
  if (key == "dt") return "RK4 step in (0, 0.1]";
  if (key == "t-max") return "final time, at most 1000";
  if (key == "stride") return "steps between samples";
  if (key == "format") return "csv or json";
  return "trajectory output path";
}

int write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) {
    std::cerr << "error: cannot write '" << path.string() << "'\n";
    return kUsage;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-atom homodyne feedback simulator"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Integrate one scenario and write trajectory + feature report");
  run->add_option("--config", run_flags.config, "flat key = value configuration file");
  for (auto& [key, value] : run_flags.overrides) {
    run->add_option("--" + key, value, flag_help(key));
  }

  std::string fig_id;
  std::filesystem::path fig_out = "figures";
  qfb::FigureOptions fig_opts;
  auto* figure = app.add_subcommand("figure", "Write the data files of one figure");
  figure->add_option("fig_id", fig_id, "2a, 2b, 2c, 3, 4a, 4b, 4c or 4d")->required();
  figure->add_option("--out", fig_out, "output directory");
  figure->add_option("--t-max", fig_opts.t_max, "final time");
  figure->add_option("--dt", fig_opts.dt, "RK4 step");
  figure->add_option("--stride", fig_opts.stride, "steps between samples");

  std::filesystem::path report_path = "verification.json";
  qfb::VerifyOptions verify_opts;
  std::string fault;
  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  verify->add_option("--out", report_path, "machine-readable report path");
  verify->add_option("--dt", verify_opts.oracle_dt, "step of the closed-form comparison (must divide 0.1)");
  verify->add_option("--inject-fault", fault, "test hook: 'feedback-sign' corrupts F")
      ->check(CLI::IsMember({"feedback-sign"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) {
      qfb::ScenarioConfig config;
      if (!run_flags.config.empty()) config = qfb::load_config_file(run_flags.config, config);
      for (const auto& [key, value] : run_flags.overrides) {
        if (value) qfb::apply_setting(config, key, *value);
      }
      const auto outputs = qfb::run_scenario(config);
      std::cout << "wrote " << outputs.trajectory.string() << " and " << outputs.report.string() << "\n";
      return kOk;
    }
    if (*figure) {
      const auto id = qfb::parse_figure_id(fig_id);
      for (const auto& path : qfb::run_figure(id, fig_out, fig_opts)) {
        std::cout << "wrote " << path.string() << "\n";
      }
      return kOk;
    }
    if (*verify) {
      verify_opts.inject_feedback_fault = fault == "feedback-sign";
      if (!(verify_opts.oracle_dt > 0.0 && verify_opts.oracle_dt <= 0.1)) {
        throw qfb::UsageError("--dt must lie in (0, 0.1]");
      }
      const auto report = qfb::run_verification(verify_opts);
      std::cout << qfb::verification_summary(report);
      if (const int rc = write_text(report_path, qfb::verification_json(report, verify_opts)); rc != kOk) {
        return rc;
      }
      return report.passed() ? kOk : kVerification;
    }
  } catch (const qfb::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const qfb::ParameterError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const qfb::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const qfb::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kUsage;
  } catch (const qfb::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kNumeric;
  } catch (const qfb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kUsage;
  }
  return kOk;
}
