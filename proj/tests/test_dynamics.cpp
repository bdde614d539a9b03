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

#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "qfb/analytic.hpp"
#include "qfb/dynamics.hpp"
#include "qfb/errors.hpp"
#include "qfb/measures.hpp"
#include "qfb/operators.hpp"

using namespace qfb;

namespace {

ModelParams model(ModelKind kind, double eta = 1.0) {
  ModelParams p;
  p.model = kind;
  p.efficiency = eta;
  return p;
}

DensityMatrix random_state(std::mt19937_64& rng) {
  return DensityMatrix::from_matrix(oracle::random_density(rng, 1 + static_cast<int>(rng() % 4)));
}

}  // namespace

TEST_CASE("model kind names") {
  for (auto k : {ModelKind::dicke, ModelKind::feedback, ModelKind::feedback_inefficient})
    CHECK(parse_model_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_model_kind("lindblad"), UsageError);
}

TEST_CASE("parameter validation") {
  ModelParams p;
  CHECK_NOTHROW(p.validate());
  p.efficiency = 0.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p.efficiency = 1.5;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = ModelParams{};
  p.gamma = -1.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = ModelParams{};
  p.gain = std::nan("");
  CHECK_THROWS_AS(p.validate(), ParameterError);
  CHECK_THROWS_AS(MasterEquation{p}, ParameterError);
}

TEST_CASE("dissipator examples") {
  const OperatorMatrix a = collective_lowering(1.0);
  CHECK(max_abs(dissipator(a, initial_state(InitialState::gg))) == 0.0);
  CHECK(max_abs(dissipator(a, initial_state(InitialState::eg_minus))) < 1e-15);

  OperatorMatrix expected = OperatorMatrix::Zero();
  for (int i : {basis::ge, basis::eg})
    for (int j : {basis::ge, basis::eg}) expected(i, j) = 1.0;
  expected(basis::ee, basis::ee) = -2.0;
  CHECK(max_abs(dissipator(a, initial_state(InitialState::ee)) - expected) < 1e-15);
}

TEST_CASE("rhs examples") {
  const DensityMatrix minus = initial_state(InitialState::eg_minus);
  for (double eta : {1.0, 0.7, 0.3, 0.05}) {
    CHECK(max_abs(rhs(model(ModelKind::feedback_inefficient, eta), minus)) < 1e-14);
  }
  const OperatorMatrix d = rhs(model(ModelKind::dicke), initial_state(InitialState::ee));
  CHECK(d(basis::ee, basis::ee).real() == doctest::Approx(-2.0).epsilon(1e-15));

  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const DensityMatrix rho = random_state(rng);
    const OperatorMatrix ideal = rhs(model(ModelKind::feedback), rho);
    REQUIRE(max_abs(rhs(model(ModelKind::feedback_inefficient, 1.0), rho) - ideal) == 0.0);
    const OperatorMatrix near = rhs(model(ModelKind::feedback_inefficient, 1.0 - 1e-8), rho);
    REQUIRE(max_abs(near - ideal) < 1e-6);
  }
}

TEST_CASE("rhs matches the vectorized Liouvillian") {
  std::mt19937_64 rng(5);
  const oracle::M16 dicke = oracle::dicke_generator();
  for (double eta : {1.0, 0.5, 0.1}) {
    const oracle::M16 gen = oracle::feedback_generator(eta);
    for (int i = 0; i < 50; ++i) {
      const DensityMatrix rho = random_state(rng);
      const OperatorMatrix expected = oracle::apply_generator(gen, rho.matrix());
      REQUIRE(max_abs(rhs(model(ModelKind::feedback_inefficient, eta), rho) - expected) < 1e-12);
      REQUIRE(max_abs(rhs(model(ModelKind::dicke), rho) - oracle::apply_generator(dicke, rho.matrix())) <
              1e-12);
    }
  }
  // Non-default gain and mixing.
  const oracle::M16 gen = oracle::feedback_generator(0.6, 0.7, -0.3);
  ModelParams p = model(ModelKind::feedback_inefficient, 0.6);
  p.gain = 0.7;
  p.mixing = -0.3;
  const DensityMatrix rho = random_state(rng);
  CHECK(max_abs(rhs(p, rho) - oracle::apply_generator(gen, rho.matrix())) < 1e-12);
}

TEST_CASE("rhs is traceless and Hermitian") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int i = 0; i < 200; ++i) {
    ModelParams p = model(ModelKind::feedback_inefficient, u(rng));
    p.omega = u(rng) - 0.5;
    p.gain = 2.0 * u(rng);
    p.mixing = u(rng);
    const OperatorMatrix d = rhs(p, random_state(rng));
    REQUIRE(std::abs(d.trace()) < 1e-13);
    REQUIRE(max_abs(d - d.adjoint()) < 1e-13);
  }
}

TEST_CASE("X form is closed under the feedback dynamics") {
  std::mt19937_64 rng(13);
  for (double eta : {1.0, 0.5, 0.1}) {
    for (int i = 0; i < 100; ++i) {
      const auto x = oracle::random_x(rng);
      const DensityMatrix rho = density_from_sym_x({x.a, x.b, x.e});
      const OperatorMatrix d = rhs(model(ModelKind::feedback_inefficient, eta), rho);
      // The generator maps the X pattern onto itself: zero off-pattern entries,
      // equal middle block, real coherence.
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
          const bool outer = (r == 0 || r == 3) && (c == 0 || c == 3);
          const bool middle = (r == 1 || r == 2) && (c == 1 || c == 2);
          if (!outer && !middle) REQUIRE(std::abs(d(r, c)) < 1e-14);
        }
      REQUIRE(std::abs(d(1, 1) - d(2, 2)) < 1e-14);
      REQUIRE(std::abs(d(1, 1) - d(1, 2)) < 1e-14);
      REQUIRE(std::abs(d(0, 3).imag()) < 1e-14);
    }
  }
  const Trajectory traj =
      evolve(initial_state(InitialState::ee), model(ModelKind::feedback_inefficient, 0.3), 1e-3, 3.0, 100);
  for (const auto& s : traj.states) REQUIRE(try_sym_x_from_density(s).has_value());
}

TEST_CASE("rk4_step") {
  const DensityMatrix minus = initial_state(InitialState::eg_minus);
  const DensityMatrix same = rk4_step(model(ModelKind::feedback_inefficient, 0.4), minus, 0.05);
  CHECK(max_abs(same.matrix() - minus.matrix()) < 1e-15);

  // For b' = -2b one RK4 step is the degree-4 Taylor polynomial of e^{-2 dt}.
  const DensityMatrix one = rk4_step(model(ModelKind::dicke), initial_state(InitialState::ee), 0.1);
  const double x = 0.2;
  const double taylor = 1 - x + x * x / 2 - x * x * x / 6 + x * x * x * x / 24;
  CHECK(one.matrix()(3, 3).real() == doctest::Approx(taylor).epsilon(1e-15));
  CHECK(std::abs(one.matrix()(3, 3).real() - std::exp(-0.2)) < 3e-6);

  CHECK_THROWS_AS(rk4_step(model(ModelKind::dicke), minus, 0.0), ParameterError);
  CHECK_THROWS_AS(rk4_step(model(ModelKind::dicke), minus, -1e-3), ParameterError);
}

TEST_CASE("evolve follows the exact propagator") {
  struct Case {
    InitialState s;
    double eta;
  };
  for (const Case c : {Case{InitialState::ee, 0.5}, Case{InitialState::gg, 0.9}, Case{InitialState::eg, 0.3},
                       Case{InitialState::eegg_minus, 1.0}}) {
    const Trajectory traj =
        evolve(initial_state(c.s), model(ModelKind::feedback_inefficient, c.eta), 1e-3, 2.0, 250);
    const oracle::M16 gen = oracle::feedback_generator(c.eta);
    REQUIRE(traj.size() == 9);
    for (std::size_t k = 0; k < traj.size(); ++k) {
      CHECK(traj.times[k] == doctest::Approx(0.25 * static_cast<double>(k)).epsilon(1e-14));
      const oracle::M4 exact = oracle::propagate(gen, initial_state(c.s).matrix(), traj.times[k]);
      CHECK(oracle::max_abs(traj.states[k].matrix() - exact) < 1e-10);
    }
  }
}

TEST_CASE("evolve examples") {
  const Trajectory ee =
      evolve(initial_state(InitialState::ee), model(ModelKind::feedback_inefficient, 0.5), 1e-3, 1.0, 1000);
  const SymXState last = sym_x_from_density(ee.states.back());
  const SymXState exact = analytic::ee_closed_form(1.0, 0.5);
  CHECK(std::abs(last.a - exact.a) < 1e-8);
  CHECK(std::abs(last.b - exact.b) < 1e-8);
  CHECK(std::abs(last.e - exact.e) < 1e-8);

  const DensityMatrix minus = initial_state(InitialState::eg_minus);
  for (double eta : {1.0, 0.5, 0.1}) {
    const Trajectory t = evolve(minus, model(ModelKind::feedback_inefficient, eta), 1e-3, 10.0, 500);
    for (const auto& s : t.states) REQUIRE(max_abs(s.matrix() - minus.matrix()) < 1e-10);
  }

  const DensityMatrix plus = initial_state(InitialState::eg_plus);
  const Trajectory t = evolve(plus, model(ModelKind::feedback), 1e-3, 10.0, 500);
  for (const auto& s : t.states) {
    REQUIRE(max_abs(s.matrix() - plus.matrix()) < 1e-10);
    REQUIRE(concurrence(s) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("evolve hygiene and errors") {
  const Trajectory t =
      evolve(initial_state(InitialState::gg), model(ModelKind::feedback_inefficient, 0.2), 1e-3, 5.0, 10);
  CHECK(t.size() == 501);
  CHECK(t.trace_error.size() == t.size());
  CHECK(t.max_trace_error() < 1e-12);
  CHECK(t.lowest_eigenvalue() > -1e-12);

  CHECK_THROWS_AS(evolve(initial_state(InitialState::gg), model(ModelKind::dicke), 0.0, 1.0), ParameterError);
  CHECK_THROWS_AS(evolve(initial_state(InitialState::gg), model(ModelKind::dicke), 1e-3, 1.0, 0),
                  ParameterError);

  // A huge gain with a coarse step drives RK4 unstable.
  ModelParams wild = model(ModelKind::feedback_inefficient, 0.1);
  wild.gain = 50.0;
  try {
    evolve(initial_state(InitialState::ee), wild, 0.05, 10.0);
    FAIL("expected IntegrationDiverged");
  } catch (const IntegrationDiverged& e) {
    CHECK(e.time() > 0.0);
    CHECK(e.time() <= 10.0);
  }
}

TEST_CASE("steady_state examples") {
  const SteadyState plus = steady_state(initial_state(InitialState::gg), model(ModelKind::feedback_inefficient));
  CHECK(max_abs(plus.state.matrix() - initial_state(InitialState::eg_plus).matrix()) < 1e-6);
  CHECK(concurrence(plus.state) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(plus.residual < 1e-10);

  const SteadyState ee = steady_state(initial_state(InitialState::ee), model(ModelKind::feedback_inefficient, 0.5));
  CHECK(std::abs(concurrence(ee.state) - 2.0 / 3.0) < 1e-4);

  const SteadyState gg = steady_state(initial_state(InitialState::gg), model(ModelKind::feedback_inefficient, 0.5));
  const SymXState s = sym_x_from_density(gg.state);
  CHECK(std::abs(s.a - 1.0 / 3.0) < 1e-6);
  CHECK(std::abs(s.b) < 1e-6);
  CHECK(std::abs(s.e) < 1e-6);

  try {
    steady_state(initial_state(InitialState::ee), model(ModelKind::feedback_inefficient, 0.5), 1e-10, 0.5);
    FAIL("expected SteadyStateTimeout");
  } catch (const SteadyStateTimeout& e) {
    CHECK(e.residual() > 1e-10);
  }
}

TEST_CASE("RK4 converges at fourth order") {
  const DensityMatrix rho0 = initial_state(InitialState::ee);
  const ModelParams p = model(ModelKind::feedback_inefficient, 0.5);
  const oracle::M4 exact = oracle::propagate(oracle::feedback_generator(0.5), rho0.matrix(), 1.0);
  const double coarse = oracle::max_abs(evolve(rho0, p, 1e-2, 1.0).states.back().matrix() - exact);
  const double fine = oracle::max_abs(evolve(rho0, p, 5e-3, 1.0).states.back().matrix() - exact);
  CHECK(coarse / fine > 14.0);
  CHECK(coarse / fine < 18.0);
}
