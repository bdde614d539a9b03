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

#include "qfb/scenario.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>

#include <json.hpp>

#include "qfb/errors.hpp"

namespace qfb {

namespace {

using nlohmann::json;

double parse_double(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
    throw UsageError("invalid value for '" + std::string(key) + "': '" + std::string(text) + "'");
  }
  return v;
}

int parse_int(std::string_view key, std::string_view text) {
  int v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw UsageError("invalid value for '" + std::string(key) + "': '" + std::string(text) + "'");
  }
  return v;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << contents;
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string_view format_name(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

json config_object(const ScenarioConfig& c) {
  return json{{"initial_state", std::string(to_string(c.initial_state))},
              {"model", std::string(to_string(c.params.model))},
              {"omega", c.params.omega},
              {"lambda", c.params.gain},
              {"mu", c.params.mixing},
              {"eta", c.params.efficiency},
              {"gamma", c.params.gamma},
              {"quadrature_phase", c.params.coupling.quadrature_phase},
              {"current_scale", c.params.coupling.current_scale},
              {"dt", c.dt},
              {"t_max", c.t_max},
              {"stride", c.stride},
              {"format", std::string(format_name(c.format))},
              {"output_path", c.output_path.generic_string()}};
}

json features_object(const FeatureReport& f) {
  json windows = json::array();
  for (const auto& w : f.esd_windows) {
    windows.push_back({{"t_start", w.start}, {"t_end", w.end}, {"length", w.length()}});
  }
  return json{{"esd_windows", windows},
              {"sudden_change_times", f.sudden_change_times},
              {"gmqd_sudden_change_times", f.gmqd_sudden_change_times},
              {"steady_value", {{"concurrence", f.steady_concurrence}, {"gmqd", f.steady_gmqd}}}};
}

}  // namespace

void ScenarioConfig::validate() const {
  const auto& p = params;
  if (!std::isfinite(p.omega)) throw UsageError("omega must be finite");
  if (!std::isfinite(p.gain)) throw UsageError("lambda must be finite");
  if (!std::isfinite(p.mixing)) throw UsageError("mu must be finite");
  if (!(p.gamma > 0.0) || !std::isfinite(p.gamma)) throw UsageError("gamma must be positive");
  if (!(p.efficiency >= kMinCliEfficiency && p.efficiency <= 1.0)) {
    throw UsageError("eta must lie in [0.01, 1]");
  }
  if (!(dt > 0.0 && dt <= 0.1)) throw UsageError("dt must lie in (0, 0.1]");
  if (!(t_max >= dt && t_max <= 1000.0)) throw UsageError("t-max must lie in [dt, 1000]");
  if (stride < 1) throw UsageError("stride must be at least 1");
  if (output_path.empty()) throw UsageError("out must not be empty");
}

void apply_setting(ScenarioConfig& c, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "initial-state" || key == "initial_state") {
    c.initial_state = parse_initial_state(value);
  } else if (key == "model") {
    c.params.model = parse_model_kind(value);
  } else if (key == "eta") {
    c.params.efficiency = parse_double(key, value);
  } else if (key == "omega") {
    c.params.omega = parse_double(key, value);
  } else if (key == "lambda") {
    c.params.gain = parse_double(key, value);
  } else if (key == "mu") {
    c.params.mixing = parse_double(key, value);
  } else if (key == "gamma") {
    c.params.gamma = parse_double(key, value);
  } else if (key == "dt") {
    c.dt = parse_double(key, value);
  } else if (key == "t-max" || key == "t_max") {
    c.t_max = parse_double(key, value);
  } else if (key == "stride") {
    c.stride = parse_int(key, value);
  } else if (key == "format") {
    if (value == "csv") {
      c.format = OutputFormat::csv;
    } else if (value == "json") {
      c.format = OutputFormat::json;
    } else {
      throw UsageError("format must be csv or json");
    }
  } else if (key == "out") {
    c.output_path = std::string(value);
  } else {
    throw UsageError("unknown setting '" + std::string(key) + "'");
  }
}

ScenarioConfig parse_config_text(std::string_view text, ScenarioConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    apply_setting(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

ScenarioConfig load_config_file(const std::filesystem::path& path, ScenarioConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), std::move(base));
}

std::string config_json(const ScenarioConfig& config) { return config_object(config).dump(2); }

ScenarioResult simulate(const ScenarioConfig& config) {
  config.validate();
  // Features are extracted on the integration grid, not the output grid, so
  // the kink detector sees the full resolution.
  std::vector<double> step_times, conc, disc;
  auto observe = [&](double t, const DensityMatrix& rho) {
    step_times.push_back(t);
    conc.push_back(concurrence(rho));
    disc.push_back(gmqd(rho, MeasuredAtom::first));
  };
  ScenarioResult r{config,
                   evolve(initial_state(config.initial_state), config.params, config.dt, config.t_max,
                          config.stride, {}, observe),
                   {}, {}};
  const auto& traj = r.trajectory;
  r.rows.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& rho = traj.states[i];
    SampleRow row{traj.times[i],
                  try_sym_x_from_density(rho),
                  concurrence(rho),
                  gmqd(rho, MeasuredAtom::first),
                  gmqd(rho, MeasuredAtom::second),
                  traj.trace_error[i],
                  traj.min_eigenvalue[i],
                  ppt_separable(rho)};
    r.rows.push_back(row);
  }
  r.features = analyze_features(step_times, conc, disc);
  return r;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.11e", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string trajectory_csv(const ScenarioResult& result) {
  std::string out(kTrajectoryHeader);
  out += '\n';
  for (const auto& row : result.rows) {
    out += format_number(row.t);
    if (row.sym_x) {
      for (double v : {row.sym_x->a, row.sym_x->b, row.sym_x->c(), row.sym_x->e}) {
        out += ',';
        out += format_number(v);
      }
    } else {
      out += ",,,,";
    }
    for (double v : {row.concurrence, row.gmqd, row.gmqd_side2, row.trace_error, row.min_eigenvalue}) {
      out += ',';
      out += format_number(v);
    }
    out += '\n';
  }
  return out;
}

std::string trajectory_json(const ScenarioResult& result) {
  json columns = json::array();
  {
    std::string_view header = kTrajectoryHeader;
    while (!header.empty()) {
      const auto comma = header.find(',');
      columns.push_back(std::string(header.substr(0, comma)));
      header = comma == std::string_view::npos ? std::string_view{} : header.substr(comma + 1);
    }
  }
  json rows = json::array();
  for (const auto& row : result.rows) {
    json r = json::array({row.t});
    if (row.sym_x) {
      r.insert(r.end(), {row.sym_x->a, row.sym_x->b, row.sym_x->c(), row.sym_x->e});
    } else {
      r.insert(r.end(), {nullptr, nullptr, nullptr, nullptr});
    }
    r.insert(r.end(), {row.concurrence, row.gmqd, row.gmqd_side2, row.trace_error, row.min_eigenvalue});
    rows.push_back(std::move(r));
  }
  return json{{"columns", columns}, {"rows", rows}}.dump() + "\n";
}

std::string feature_report_json(const FeatureReport& features) {
  return features_object(features).dump(2) + "\n";
}

ScenarioOutputs run_scenario(const ScenarioConfig& config) {
  const ScenarioResult result = simulate(config);
  ScenarioOutputs out;
  out.trajectory = config.output_path;
  out.report = config.output_path;
  out.report.replace_extension(".report.json");
  write_file(out.trajectory, config.format == OutputFormat::csv ? trajectory_csv(result)
                                                                 : trajectory_json(result));
  const json report{{"config", config_object(config)}, {"features", features_object(result.features)}};
  write_file(out.report, report.dump(2) + "\n");
  return out;
}

// ---------------------------------------------------------------------------
// Figures

namespace {

struct FigureName {
  FigureId id;
  std::string_view name;
  InitialState initial;
};

constexpr FigureName kFigures[] = {
    {FigureId::fig2a, "2a", InitialState::ee},       {FigureId::fig2b, "2b", InitialState::gg},
    {FigureId::fig2c, "2c", InitialState::eg},       {FigureId::fig3, "3", InitialState::ee},
    {FigureId::fig4a, "4a", InitialState::eg_plus},  {FigureId::fig4b, "4b", InitialState::eg_minus},
    {FigureId::fig4c, "4c", InitialState::eegg_plus}, {FigureId::fig4d, "4d", InitialState::eegg_minus}};

const FigureName& figure_entry(FigureId id) {
  for (const auto& f : kFigures) {
    if (f.id == id) return f;
  }
  throw UsageError("unknown figure");
}

}  // namespace

std::string_view to_string(FigureId id) { return figure_entry(id).name; }

FigureId parse_figure_id(std::string_view text) {
  if (text.starts_with("fig")) text.remove_prefix(3);
  for (const auto& f : kFigures) {
    if (f.name == text) return f.id;
  }
  throw UsageError("unknown figure '" + std::string(text) + "' (expected 2a, 2b, 2c, 3, 4a, 4b, 4c, 4d)");
}

std::vector<FigureCurve> figure_curves(FigureId id, const std::filesystem::path& out_dir,
                                       const FigureOptions& options) {
  const auto& entry = figure_entry(id);
  struct CurveSpec {
    std::string label;
    ModelKind model;
    double eta;
  };
  std::vector<CurveSpec> specs;
  if (id == FigureId::fig3) {
    specs = {{"nofeedback", ModelKind::dicke, 1.0},
             {"eta1", ModelKind::feedback_inefficient, 1.0},
             {"eta0.5", ModelKind::feedback_inefficient, 0.5}};
  } else {
    specs = {{"eta1", ModelKind::feedback_inefficient, 1.0},
             {"eta0.5", ModelKind::feedback_inefficient, 0.5},
             {"eta0.1", ModelKind::feedback_inefficient, 0.1},
             {"nofeedback", ModelKind::dicke, 1.0}};
  }
  std::vector<FigureCurve> curves;
  for (const auto& s : specs) {
    ScenarioConfig c;
    c.initial_state = entry.initial;
    c.params.model = s.model;
    c.params.efficiency = s.eta;
    c.dt = options.dt;
    c.t_max = options.t_max;
    c.stride = options.stride;
    c.format = OutputFormat::csv;
    c.output_path = out_dir / ("fig" + std::string(entry.name) + "_" + s.label + ".csv");
    curves.push_back({s.label, c});
  }
  return curves;
}

std::string wedge_csv(const ScenarioResult& result) {
  std::string out(kWedgeHeader);
  out += '\n';
  for (const auto& row : result.rows) {
    out += format_number(row.t);
    if (row.sym_x) {
      for (double v : {row.sym_x->a, row.sym_x->b, row.sym_x->e}) {
        out += ',';
        out += format_number(v);
      }
    } else {
      out += ",,,";
    }
    out += row.separable ? ",1\n" : ",0\n";
  }
  return out;
}

std::vector<std::filesystem::path> run_figure(FigureId id, const std::filesystem::path& out_dir,
                                              const FigureOptions& options) {
  const auto curves = figure_curves(id, out_dir, options);
  std::vector<std::future<void>> jobs;
  jobs.reserve(curves.size());
  for (const auto& curve : curves) {
    jobs.push_back(std::async(std::launch::async, [&curve, id] {
      const ScenarioResult result = simulate(curve.config);
      const auto& path = curve.config.output_path;
      write_file(path, id == FigureId::fig3 ? wedge_csv(result) : trajectory_csv(result));
      auto sidecar = path;
      sidecar.replace_extension(".json");
      const json meta{{"figure", std::string(to_string(id))},
                      {"curve", curve.label},
                      {"columns", std::string(id == FigureId::fig3 ? kWedgeHeader : kTrajectoryHeader)},
                      {"config", config_object(curve.config)},
                      {"features", features_object(result.features)}};
      write_file(sidecar, meta.dump(2) + "\n");
    }));
  }
  for (auto& j : jobs) j.get();
  std::vector<std::filesystem::path> files;
  for (const auto& curve : curves) files.push_back(curve.config.output_path);
  return files;
}

}  // namespace qfb
