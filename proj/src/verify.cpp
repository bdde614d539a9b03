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

#include "qfb/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "qfb/analytic.hpp"
#include "qfb/dynamics.hpp"
#include "qfb/errors.hpp"
#include "qfb/measures.hpp"
#include "qfb/operators.hpp"

namespace qfb {

namespace {

constexpr double kDefaultDt = 1e-3;

struct Hygiene {
  double max_trace_error = 0.0;
  double min_eigenvalue = std::numeric_limits<double>::infinity();

  void add(const Trajectory& t) {
    max_trace_error = std::max(max_trace_error, t.max_trace_error());
    min_eigenvalue = std::min(min_eigenvalue, t.lowest_eigenvalue());
  }
};

class Suite {
 public:
  explicit Suite(const VerifyOptions& o) : opts_(o) {}

  ModelParams feedback(double eta) const {
    ModelParams p;
    p.model = ModelKind::feedback_inefficient;
    p.efficiency = eta;
    if (opts_.inject_feedback_fault) {
      const Matrix2 sx = pauli(Axis::x);
      const Matrix2 sz = pauli(Axis::z);
      const Matrix2 id = Matrix2::Identity();
      p.feedback_override = -(tensor(sx, sz) - tensor(sz, sx) + tensor(sx, id) + tensor(id, sx));
    }
    return p;
  }

  static ModelParams dicke() {
    ModelParams p;
    p.model = ModelKind::dicke;
    return p;
  }

  Trajectory run(InitialState s, const ModelParams& p, double t_max, int stride,
                 double dt = kDefaultDt) {
    Trajectory t = evolve(initial_state(s), p, dt, t_max, stride);
    hygiene_.add(t);
    return t;
  }

  const Hygiene& hygiene() const { return hygiene_; }
  const VerifyOptions& options() const { return opts_; }

 private:
  VerifyOptions opts_;
  Hygiene hygiene_;
};

Check at_most(std::string name, double measured, double tol) {
  return {std::move(name), measured, tol, "<=", measured <= tol};
}
Check below(std::string name, double measured, double tol) {
  return {std::move(name), measured, tol, "<", measured < tol};
}
Check above(std::string name, double measured, double tol) {
  return {std::move(name), measured, tol, ">", measured > tol};
}
Check at_least(std::string name, double measured, double tol) {
  return {std::move(name), measured, tol, ">=", measured >= tol};
}
Check holds(std::string name, bool ok, double measured = 0.0) {
  return {std::move(name), measured, 0.0, "holds", ok};
}

std::string eta_label(double eta) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "eta=%g", eta);
  return buf;
}

double state_distance(const DensityMatrix& rho, const SymXState& s) {
  return max_abs(rho.matrix() - density_from_sym_x(s).matrix());
}

std::vector<double> series(const Trajectory& t, double (*measure)(const DensityMatrix&)) {
  std::vector<double> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = measure(t.states[i]);
  return out;
}

double concurrence_of(const DensityMatrix& r) { return concurrence(r); }
double gmqd_of(const DensityMatrix& r) { return gmqd(r, MeasuredAtom::first); }

/// Largest drop between consecutive samples (0 for a nondecreasing series).
double largest_drop(const std::vector<double>& v) {
  double drop = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) drop = std::max(drop, v[i - 1] - v[i]);
  return drop;
}

// Max entrywise deviation from the closed forms over the grid of criterion 2.
double oracle_error(Suite& suite, double dt, bool track_hygiene) {
  static constexpr double kTimes[] = {0.1, 0.5, 1.0, 2.0, 5.0};
  const long per_tenth = std::lround(0.1 / dt);
  if (per_tenth < 1 || std::abs(per_tenth * dt - 0.1) > 1e-12) {
    throw UsageError("oracle dt must divide 0.1");
  }
  const int stride = static_cast<int>(per_tenth);
  double worst = 0.0;
  auto compare = [&](InitialState s, double eta, auto closed_form) {
    Trajectory traj = track_hygiene
                          ? suite.run(s, suite.feedback(eta), 5.0, stride, dt)
                          : evolve(initial_state(s), suite.feedback(eta), dt, 5.0, stride);
    for (double t : kTimes) {
      const auto k = static_cast<std::size_t>(std::lround(t / 0.1));
      worst = std::max(worst, state_distance(traj.states.at(k), closed_form(t, eta)));
    }
  };
  for (double eta : {0.1, 0.5, 0.9}) compare(InitialState::ee, eta, analytic::ee_closed_form);
  for (double eta : {0.1, 0.5, 0.9, 1.0}) compare(InitialState::gg, eta, analytic::gg_closed_form);
  return worst;
}

CriterionResult steady_law(Suite& suite) {
  CriterionResult r{1, "Steady concurrence law C(t=50) = 1/(2-eta)", {}};
  for (InitialState s : {InitialState::ee, InitialState::gg}) {
    for (double eta : {0.1, 0.25, 0.5, 0.75, 1.0}) {
      const Trajectory t = suite.run(s, suite.feedback(eta), 50.0, 50000);
      const double err = std::abs(concurrence(t.states.back()) - analytic::steady_concurrence(eta));
      r.checks.push_back(at_most(std::string(to_string(s)) + " " + eta_label(eta) + " |C - 1/(2-eta)|",
                                 err, 1e-4));
    }
  }
  return r;
}

CriterionResult closed_form_match(Suite& suite) {
  CriterionResult r{2, "RK4 matches the |ee> and |gg> closed forms entrywise", {}};
  const double dt = suite.options().oracle_dt;
  r.checks.push_back(at_most("max entrywise deviation (dt=" + std::to_string(dt) + ")",
                             oracle_error(suite, dt, true), oracle_tolerance(dt)));
  return r;
}

CriterionResult phi_minus_frozen(Suite& suite) {
  CriterionResult r{3, "phi- is frozen for every eta", {}};
  const DensityMatrix rho0 = initial_state(InitialState::eg_minus);
  for (double eta : {0.1, 0.5, 1.0}) {
    const Trajectory t = suite.run(InitialState::eg_minus, suite.feedback(eta), 10.0, 1);
    double dev = 0.0, cdev = 0.0, ddev = 0.0;
    for (const auto& rho : t.states) {
      dev = std::max(dev, max_abs(rho.matrix() - rho0.matrix()));
      cdev = std::max(cdev, std::abs(concurrence(rho) - 1.0));
      ddev = std::max(ddev, std::abs(gmqd(rho) - 0.5));
    }
    const auto tag = eta_label(eta);
    r.checks.push_back(below(tag + " max |rho(t) - rho(0)|", dev, 1e-9));
    r.checks.push_back(at_most(tag + " max |C - 1|", cdev, 1e-9));
    r.checks.push_back(at_most(tag + " max |D - 1/2|", ddev, 1e-9));
  }
  return r;
}

CriterionResult phi_plus_fixed(Suite& suite) {
  CriterionResult r{4, "phi+ stays maximally entangled at eta=1", {}};
  const Trajectory t = suite.run(InitialState::eg_plus, suite.feedback(1.0), 10.0, 1);
  double dev = 0.0;
  for (const auto& rho : t.states) dev = std::max(dev, std::abs(concurrence(rho) - 1.0));
  r.checks.push_back(at_most("max |C - 1|", dev, 1e-8));
  return r;
}

CriterionResult sudden_change(Suite& suite) {
  CriterionResult r{5, "Sudden change of concurrence at t=0.5 for (|ee>-|gg>)/sqrt2, eta=1", {}};
  const Trajectory t = suite.run(InitialState::eegg_minus, suite.feedback(1.0), 10.0, 1);
  const auto conc = series(t, concurrence_of);
  const auto points = sudden_change_points(t.times, conc);
  r.checks.push_back(holds("exactly one sudden change", points.size() == 1,
                           static_cast<double>(points.size())));
  const double where = points.empty() ? std::nan("") : points.front();
  r.checks.push_back(holds("located in [0.498, 0.502]", where >= 0.498 && where <= 0.502, where));
  double dev = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    dev = std::max(dev, std::abs(conc[i] - analytic::eegg_minus_concurrence(t.times[i])));
  }
  r.checks.push_back(at_most("max |C - max[0,C1,C2]|", dev, 1e-6));
  return r;
}

CriterionResult esd_ordering(Suite& suite) {
  CriterionResult r{6, "ESD window length grows as eta decreases", {}};
  double previous = -1.0;
  for (double eta : {0.9, 0.7, 0.5, 0.3, 0.1}) {
    const Trajectory t = suite.run(InitialState::ee, suite.feedback(eta), 10.0, 10);
    const auto windows = esd_windows(t.times, series(t, concurrence_of));
    double longest = 0.0;
    for (const auto& w : windows) longest = std::max(longest, w.length());
    const auto tag = eta_label(eta);
    r.checks.push_back(holds(tag + " single window", windows.size() == 1,
                             static_cast<double>(windows.size())));
    r.checks.push_back({tag + " window length > previous", longest, previous, ">", longest > previous});
    previous = longest;
  }
  const Trajectory t = suite.run(InitialState::ee, suite.feedback(1.0), 10.0, 10);
  const double spacing = t.dt * t.stride;
  double longest = 0.0;
  for (const auto& w : esd_windows(t.times, series(t, concurrence_of))) {
    longest = std::max(longest, w.length());
  }
  r.checks.push_back(at_most("eta=1 longest window", longest, 2.0 * spacing));
  return r;
}

CriterionResult noise_triggered(Suite& suite) {
  CriterionResult r{7, "|gg> gains correlations monotonically", {}};
  for (double eta : {0.1, 0.5, 1.0}) {
    const Trajectory t = suite.run(InitialState::gg, suite.feedback(eta), 10.0, 10);
    const auto conc = series(t, concurrence_of);
    const auto disc = series(t, gmqd_of);
    const auto tag = eta_label(eta);
    const SymXState steady{(1.0 - eta) / (2.0 - eta), 0.0, 0.0};
    r.checks.push_back(at_most(tag + " concurrence largest drop", largest_drop(conc), 1e-12));
    r.checks.push_back(at_most(tag + " gmqd largest drop", largest_drop(disc), 1e-12));
    r.checks.push_back(
        at_most(tag + " |C(10) - 1/(2-eta)|", std::abs(conc.back() - analytic::steady_concurrence(eta)), 1e-4));
    r.checks.push_back(at_most(tag + " |D(10) - D_X(steady)|", std::abs(disc.back() - gmqd_sym_x(steady)), 1e-4));
  }
  return r;
}

CriterionResult eg_nullity(Suite& suite) {
  CriterionResult r{8, "|eg> stays uncorrelated at eta=1; steady C decreases with eta", {}};
  const Trajectory t = suite.run(InitialState::eg, suite.feedback(1.0), 10.0, 1);
  double cmax = 0.0, dmax = 0.0;
  for (const auto& rho : t.states) {
    cmax = std::max(cmax, concurrence(rho));
    dmax = std::max({dmax, gmqd(rho, MeasuredAtom::first), gmqd(rho, MeasuredAtom::second)});
  }
  r.checks.push_back(below("eta=1 max C", cmax, 1e-8));
  r.checks.push_back(below("eta=1 max D (both sides)", dmax, 1e-8));
  double previous = std::numeric_limits<double>::infinity();
  for (double eta : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const Trajectory s = suite.run(InitialState::eg, suite.feedback(eta), 50.0, 50000);
    const double c = concurrence(s.states.back());
    r.checks.push_back({eta_label(eta) + " C(50) < previous", c, previous, "<", c < previous});
    previous = c;
  }
  return r;
}

CriterionResult no_feedback_bump(Suite& suite) {
  CriterionResult r{9, "Without feedback: no entanglement, transient discord", {}};
  const Trajectory t = suite.run(InitialState::ee, Suite::dicke(), 50.0, 10);
  const auto conc = series(t, concurrence_of);
  const auto disc = series(t, gmqd_of);
  const auto peak = std::max_element(disc.begin(), disc.end());
  const double peak_time = t.times[static_cast<std::size_t>(peak - disc.begin())];
  r.checks.push_back(below("max C", *std::max_element(conc.begin(), conc.end()), 1e-8));
  r.checks.push_back(above("max D", *peak, 1e-3));
  r.checks.push_back(holds("peak strictly inside (0, 50)", peak_time > 0.0 && peak_time < 50.0, peak_time));
  r.checks.push_back(below("D(50)", disc.back(), 1e-6));
  return r;
}

SymXState random_sym_x(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double a = unit(rng), b = unit(rng);
  if (a + b > 1.0) {
    a = 1.0 - a;
    b = 1.0 - b;
  }
  const double bound = std::sqrt(a * b);
  return {a, b, std::uniform_real_distribution<double>(-bound, bound)(rng)};
}

DensityMatrix random_mixture(std::mt19937_64& rng, int kind) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto ket = [&] {
    StateVector v;
    for (int i = 0; i < 4; ++i) v(i) = Complex(normal(rng), normal(rng));
    return StateVector(v / v.norm());
  };
  OperatorMatrix m = OperatorMatrix::Zero();
  switch (kind % 3) {
    case 0: {  // pure state with white noise
      const StateVector v = ket();
      const double p = unit(rng);
      m = p * v * v.adjoint() + (1.0 - p) * 0.25 * OperatorMatrix::Identity();
      break;
    }
    case 1: {  // Ginibre ensemble of random rank
      const int rank = 1 + static_cast<int>(unit(rng) * 4.0) % 4;
      for (int k = 0; k < rank; ++k) {
        const StateVector v = ket();
        m += unit(rng) * v * v.adjoint();
      }
      m /= m.trace();
      break;
    }
    default: {  // mixture of product states
      for (int k = 0; k < 3; ++k) {
        Eigen::Vector2cd u, w;
        for (int i = 0; i < 2; ++i) {
          u(i) = Complex(normal(rng), normal(rng));
          w(i) = Complex(normal(rng), normal(rng));
        }
        u.normalize();
        w.normalize();
        m += unit(rng) * tensor(u * u.adjoint(), w * w.adjoint());
      }
      m /= m.trace();
      break;
    }
  }
  return DensityMatrix::from_matrix_unchecked(0.5 * (m + m.adjoint()));
}

CriterionResult measure_equivalence(const VerifyOptions& opts) {
  CriterionResult r{10, "X-form measure formulas agree with the general evaluations", {}};
  std::mt19937_64 rng(opts.seed);
  double cdev = 0.0, ddev = 0.0;
  for (int i = 0; i < opts.random_samples; ++i) {
    const SymXState s = random_sym_x(rng);
    const DensityMatrix rho = density_from_sym_x(s);
    cdev = std::max(cdev, std::abs(concurrence_sym_x(s) - concurrence(rho)));
    ddev = std::max(ddev, std::abs(gmqd_sym_x(s) - gmqd(rho)));
  }
  r.checks.push_back(at_most("max |C_X - C_Wootters|", cdev, 1e-10));
  r.checks.push_back(at_most("max |D_X - D_Bloch|", ddev, 1e-10));
  int mismatches = 0;
  for (int i = 0; i < opts.random_samples; ++i) {
    const DensityMatrix rho = random_mixture(rng, i);
    const bool zero = concurrence(rho) <= 1e-10;
    if (zero != ppt_separable(rho)) ++mismatches;
  }
  r.checks.push_back(at_most("C = 0 <=> PPT mismatches", mismatches, 0.0));
  return r;
}

CriterionResult integrator_hygiene(Suite& suite) {
  CriterionResult r{11, "Integrator hygiene and fourth-order convergence", {}};
  r.checks.push_back(below("max trace error over all trajectories", suite.hygiene().max_trace_error, 1e-9));
  r.checks.push_back(above("min eigenvalue over all trajectories", suite.hygiene().min_eigenvalue, -1e-7));
  const double coarse = oracle_error(suite, 1e-2, false);
  const double fine = oracle_error(suite, 5e-3, false);
  r.checks.push_back(at_least("closed-form error ratio dt=1e-2 vs 5e-3", coarse / fine, 12.0));
  return r;
}

}  // namespace

bool CriterionResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

bool VerifyReport::passed() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.passed(); });
}

double oracle_tolerance(double dt) {
  // Measured global error is ~1.5e3 dt^4 below dt = 0.02 and ~6e3 dt^4 at dt = 0.05.
  constexpr double kBase = 1e-7;
  constexpr double kFourthOrder = 1e4;
  return std::max(kBase, kFourthOrder * dt * dt * dt * dt);
}

VerifyReport run_verification(const VerifyOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  Suite suite(options);
  VerifyReport report;
  // A criterion that throws (diverged integration, missing feature) fails
  // instead of aborting the suite.
  auto guarded = [&](int id, const char* title, auto&& criterion) {
    try {
      report.criteria.push_back(criterion());
    } catch (const UsageError&) {
      throw;
    } catch (const std::exception& e) {
      report.criteria.push_back({id, title, {holds(std::string("raised: ") + e.what(), false)}});
    }
  };
  guarded(1, "Steady concurrence law", [&] { return steady_law(suite); });
  guarded(2, "Closed-form match", [&] { return closed_form_match(suite); });
  guarded(3, "phi- frozen", [&] { return phi_minus_frozen(suite); });
  guarded(4, "phi+ fixed point", [&] { return phi_plus_fixed(suite); });
  guarded(5, "Sudden change", [&] { return sudden_change(suite); });
  guarded(6, "ESD ordering", [&] { return esd_ordering(suite); });
  guarded(7, "Noise-triggered correlation", [&] { return noise_triggered(suite); });
  guarded(8, "|eg> nullity", [&] { return eg_nullity(suite); });
  guarded(9, "No-feedback discord bump", [&] { return no_feedback_bump(suite); });
  guarded(10, "Measure equivalence", [&] { return measure_equivalence(options); });
  guarded(11, "Integrator hygiene", [&] { return integrator_hygiene(suite); });
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string verification_json(const VerifyReport& report, const VerifyOptions& options) {
  using nlohmann::json;
  json criteria = json::array();
  for (const auto& c : report.criteria) {
    json checks = json::array();
    for (const auto& k : c.checks) {
      checks.push_back({{"name", k.name},
                        {"measured", std::isfinite(k.measured) ? json(k.measured) : json(nullptr)},
                        {"tolerance", k.tolerance},
                        {"relation", k.relation},
                        {"passed", k.passed}});
    }
    criteria.push_back({{"id", c.id}, {"title", c.title}, {"passed", c.passed()}, {"checks", checks}});
  }
  json out{{"passed", report.passed()},
           {"runtime_seconds", report.seconds},
           {"options",
            {{"oracle_dt", options.oracle_dt},
             {"inject_feedback_fault", options.inject_feedback_fault},
             {"random_samples", options.random_samples},
             {"seed", options.seed}}},
           {"criteria", criteria}};
  return out.dump(2) + "\n";
}

std::string verification_summary(const VerifyReport& report) {
  std::ostringstream out;
  for (const auto& c : report.criteria) {
    // Report the first failing check, or the last one when all pass.
    const auto failing = std::find_if(c.checks.begin(), c.checks.end(), [](const Check& k) { return !k.passed; });
    const Check& shown = failing != c.checks.end() ? *failing : c.checks.back();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e %s %.3e", shown.measured, shown.relation.c_str(), shown.tolerance);
    out << (c.passed() ? "[PASS] " : "[FAIL] ") << c.id << ". " << c.title << " (" << c.checks.size()
        << " checks; " << shown.name << ": " << buf << ")\n";
  }
  out << (report.passed() ? "all criteria passed" : "verification FAILED") << " in " << report.seconds << " s\n";
  return out.str();
}

}  // namespace qfb
