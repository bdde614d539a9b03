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

#include "qfb/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qfb/errors.hpp"

namespace qfb::analytic {

namespace {

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw DomainError("closed form: t must be finite and nonnegative");
  }
}

/// (e^z - 1 - z) / z^2
double phi2(double z) {
  if (std::abs(z) < 0.05) {
    double sum = 0.0;
    double fact = 362880.0;  // 9!
    for (int k = 7; k >= 0; --k) {
      sum = sum * z + 1.0 / fact;
      fact /= static_cast<double>(k + 2);
    }
    return sum;
  }
  return (std::expm1(z) - z) / (z * z);
}

}  // namespace

SymXState ee_closed_form(double t, double eta) {
  require_time(t);
  if (!(eta > 0.0 && eta < 1.0)) {
    throw DomainError("ee_closed_form: eta must lie strictly inside (0, 1), got " +
                      std::to_string(eta) + "; integrate the master equation for eta = 1");
  }
  // Written directly, a(t) divides an O((eta-1)^3) cancellation by (eta-1)^2.
  // Expanding both exponentials around eta = 1 with phi2 removes the
  // cancelling orders exactly.
  const double x = eta - 1.0;
  const double ep = eta - 2.0;
  const double b1 = -16.0 * ep * eta * eta;
  const double b4 = (eta - 3.0) * eta * (1.0 + eta);
  const double z = t * x / eta;
  const double u = t / eta;
  const double curved = u * u * (b1 * phi2(z) + 16.0 * b4 * phi2(4.0 * z));
  const double a = (6.0 * x + std::exp(-2.0 * t) * (-6.0 * x - 12.0 * t * x + curved)) / (6.0 * ep);
  const double b = std::exp(-2.0 * t);
  const double e = 2.0 * eta * b * std::expm1(z) / x;
  return {a, b, e};
}

SymXState gg_closed_form(double t, double eta) {
  require_time(t);
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw DomainError("gg_closed_form: eta must lie in (0, 1], got " + std::to_string(eta));
  }
  const double a = (1.0 - eta + std::exp(-2.0 * t * (2.0 - eta) / eta)) / (2.0 - eta);
  return {a, 0.0, 0.0};
}

double steady_concurrence(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw DomainError("steady_concurrence: eta must lie in (0, 1], got " + std::to_string(eta));
  }
  return 1.0 / (2.0 - eta);
}

ConcurrenceBranches eegg_minus_branches(double t) {
  require_time(t);
  const double decay = std::exp(-2.0 * t);
  const double kink = std::abs(1.0 - 2.0 * t);
  // e^{-2t} e^{2t} is written as 1 to avoid overflow.
  const double c1 = decay * (-1.0 + 2.0 * t - 2.0 * t * t - kink) + 1.0;
  const double c2 = decay * kink -
                    (1.0 - 0.5 * decay - 0.5 * decay * (1.0 - 2.0 * t) * (1.0 - 2.0 * t));
  return {c1, c2};
}

double eegg_minus_concurrence(double t) {
  const auto [c1, c2] = eegg_minus_branches(t);
  return std::max({0.0, c1, c2});
}

}  // namespace qfb::analytic
