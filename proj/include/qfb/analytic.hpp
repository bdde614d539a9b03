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

// Closed-form solutions for the feedback model at Omega = 0, lambda = mu = 1.

#include "qfb/operators.hpp"

namespace qfb::analytic {

/// X-form state at time t for initial |ee>, detection efficiency eta in (0, 1).
/// The expressions for a(t) and e(t) are singular at eta = 1; throws DomainError there.
SymXState ee_closed_form(double t, double eta);

/// X-form state at time t for initial |gg>, eta in (0, 1].
SymXState gg_closed_form(double t, double eta);

/// Long-time concurrence from |ee> or |gg>: 1 / (2 - eta).
double steady_concurrence(double eta);

struct ConcurrenceBranches {
  double c1;
  double c2;
};

/// The two branches of the eta = 1 concurrence for initial (|ee> - |gg>)/sqrt2.
ConcurrenceBranches eegg_minus_branches(double t);
/// max(0, C1, C2).
double eegg_minus_concurrence(double t);

}  // namespace qfb::analytic
