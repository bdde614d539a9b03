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

// Acceptance suite: reproduces the quantitative claims about the feedback
// model and checks the integrator against the closed forms.

#include <string>
#include <vector>

namespace qfb {

struct VerifyOptions {
  /// Step of the RK4 versus closed-form comparison (criterion 2).
  double oracle_dt = 1e-4;
  /// Replaces F by a variant whose sz sx cross term has the wrong sign.
  /// Used to check that the suite detects a broken feedback operator.
  bool inject_feedback_fault = false;
  /// 1000 in the full suite.
  int random_samples = 1000;
  unsigned long long seed = 20260214ULL;
};

struct Check {
  std::string name;
  double measured;
  double tolerance;
  std::string relation;  ///< "<", "<=", ">=", ">", "==", "monotone", ...
  bool passed;
};

struct CriterionResult {
  int id;
  std::string title;
  std::vector<Check> checks;

  bool passed() const;
};

struct VerifyReport {
  std::vector<CriterionResult> criteria;
  double seconds = 0.0;

  bool passed() const;
};

/// Tolerance of the closed-form match at a given step: max(1e-7, 1e4 dt^4).
double oracle_tolerance(double dt);

VerifyReport run_verification(const VerifyOptions& options = {});

std::string verification_json(const VerifyReport& report, const VerifyOptions& options);
/// One line per criterion.
std::string verification_summary(const VerifyReport& report);

}  // namespace qfb
