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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qfb/errors.hpp"
#include "qfb/scenario.hpp"

using namespace qfb;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const char* env = std::getenv("QFB_TEST_TMP");
  const fs::path root = env ? fs::path(env) : fs::temp_directory_path() / "qfb_test_scenario";
  const fs::path dir = root / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::string usage_message(ScenarioConfig c) {
  try {
    c.validate();
  } catch (const UsageError& e) {
    return e.what();
  }
  return {};
}

ScenarioConfig short_config(InitialState s, double eta) {
  ScenarioConfig c;
  c.initial_state = s;
  c.params.efficiency = eta;
  c.t_max = 2.0;
  c.stride = 100;
  return c;
}

}  // namespace

TEST_CASE("config validation names the field") {
  ScenarioConfig c;
  CHECK(usage_message(c).empty());
  c.params.efficiency = 0.005;
  CHECK(usage_message(c).find("eta") != std::string::npos);
  c = {};
  c.dt = 0.2;
  CHECK(usage_message(c).find("dt") != std::string::npos);
  c = {};
  c.t_max = 2000.0;
  CHECK(usage_message(c).find("t-max") != std::string::npos);
  c = {};
  c.stride = 0;
  CHECK(usage_message(c).find("stride") != std::string::npos);
  c = {};
  c.params.gamma = 0.0;
  CHECK(usage_message(c).find("gamma") != std::string::npos);
}

TEST_CASE("config text and overrides") {
  const ScenarioConfig c = parse_config_text(
      "# fig 2a\n"
      "initial-state = eg_minus\n"
      "model=feedback\n"
      "  eta = 0.25   # inline\n"
      "lambda = 2\n"
      "mu = 0.5\n"
      "omega = 0.1\n"
      "dt = 0.002\n"
      "t_max = 4\n"
      "stride = 5\n"
      "format = json\n"
      "out = data/x.json\n");
  CHECK(c.initial_state == InitialState::eg_minus);
  CHECK(c.params.model == ModelKind::feedback);
  CHECK(c.params.efficiency == 0.25);
  CHECK(c.params.gain == 2.0);
  CHECK(c.params.mixing == 0.5);
  CHECK(c.params.omega == 0.1);
  CHECK(c.dt == 0.002);
  CHECK(c.t_max == 4.0);
  CHECK(c.stride == 5);
  CHECK(c.format == OutputFormat::json);
  CHECK(c.output_path == fs::path("data/x.json"));

  ScenarioConfig o = c;
  apply_setting(o, "eta", "0.75");
  CHECK(o.params.efficiency == 0.75);
  CHECK(o.params.gain == 2.0);

  CHECK_THROWS_AS(parse_config_text("eta 0.5\n"), UsageError);
  CHECK_THROWS_AS(parse_config_text("speed = 3\n"), UsageError);
  CHECK_THROWS_AS(parse_config_text("eta = fast\n"), UsageError);
  CHECK_THROWS_AS(parse_config_text("stride = 2.5\n"), UsageError);
  CHECK_THROWS_AS(parse_config_text("format = xml\n"), UsageError);
  CHECK_THROWS_AS(parse_config_text("initial-state = up\n"), UsageError);
  CHECK_THROWS_AS(load_config_file(scratch("missing") / "nope.cfg"), IoError);

  const fs::path file = scratch("cfg") / "run.cfg";
  std::ofstream(file) << "eta = 0.3\nmodel = dicke\n";
  const ScenarioConfig loaded = load_config_file(file);
  CHECK(loaded.params.efficiency == 0.3);
  CHECK(loaded.params.model == ModelKind::dicke);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.0) == "0.00000000000e+00");
  CHECK(format_number(-0.0) == "0.00000000000e+00");
  CHECK(format_number(1.0 / 3.0) == "3.33333333333e-01");
  CHECK(format_number(-2.5e-12) == "-2.50000000000e-12");
}

TEST_CASE("trajectory csv layout") {
  ScenarioConfig c = short_config(InitialState::ee, 0.5);
  const ScenarioResult r = simulate(c);
  const auto rows = csv_rows(trajectory_csv(r));
  REQUIRE(rows.size() == 22);
  CHECK(trajectory_csv(r).substr(0, kTrajectoryHeader.size() + 1) == std::string(kTrajectoryHeader) + "\n");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 10);
    for (const auto& cell : rows[i]) REQUIRE_FALSE(cell.empty());
  }
  CHECK(std::stod(rows[1][0]) == 0.0);
  CHECK(std::stod(rows.back()[0]) == doctest::Approx(2.0));
  CHECK(std::stod(rows.back()[2]) == doctest::Approx(std::exp(-4.0)).epsilon(1e-9));

  // |eg> leaves the X form: a, b, c, e are blank.
  const ScenarioResult eg = simulate(short_config(InitialState::eg, 0.5));
  const auto eg_rows = csv_rows(trajectory_csv(eg));
  for (std::size_t i = 1; i < eg_rows.size(); ++i) {
    REQUIRE(eg_rows[i].size() == 10);
    for (int k = 1; k <= 4; ++k) REQUIRE(eg_rows[i][k].empty());
    REQUIRE_FALSE(eg_rows[i][5].empty());
  }

  const auto doc = nlohmann::json::parse(trajectory_json(eg));
  CHECK(doc["columns"].size() == 10);
  CHECK(doc["rows"].size() == eg.rows.size());
  CHECK(doc["rows"][1][1].is_null());
  CHECK(doc["rows"][1][5].is_number());
}

TEST_CASE("run_scenario examples") {
  const fs::path dir = scratch("run");
  ScenarioConfig c;
  c.params.efficiency = 0.5;
  c.t_max = 20.0;
  c.output_path = dir / "ee.csv";
  const ScenarioOutputs out = run_scenario(c);
  CHECK(out.trajectory == dir / "ee.csv");
  CHECK(out.report == dir / "ee.report.json");
  const auto report = nlohmann::json::parse(slurp(out.report));
  CHECK(report["features"]["esd_windows"].size() == 1);
  CHECK(report["features"]["steady_value"]["concurrence"].get<double>() ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-6));
  CHECK(report["config"]["eta"].get<double>() == 0.5);

  const std::string first = slurp(out.trajectory);
  run_scenario(c);
  CHECK(slurp(out.trajectory) == first);
  CHECK(slurp(out.report) == report.dump(2) + "\n");

  ScenarioConfig minus;
  minus.initial_state = InitialState::eg_minus;
  minus.params.efficiency = 0.1;
  minus.output_path = dir / "minus.csv";
  run_scenario(minus);
  const auto minus_rows = csv_rows(slurp(minus.output_path));
  REQUIRE(minus_rows.size() == 1002);
  for (std::size_t i = 1; i < minus_rows.size(); ++i) {
    REQUIRE(std::abs(std::stod(minus_rows[i][5]) - 1.0) < 1e-9);
    REQUIRE(std::abs(std::stod(minus_rows[i][6]) - 0.5) < 1e-9);
  }

  ScenarioConfig eg;
  eg.initial_state = InitialState::eg;
  eg.params.model = ModelKind::feedback;
  eg.output_path = dir / "eg.json";
  eg.format = OutputFormat::json;
  run_scenario(eg);
  const auto doc = nlohmann::json::parse(slurp(eg.output_path));
  for (const auto& row : doc["rows"]) {
    REQUIRE(std::abs(row[5].get<double>()) < 1e-8);
    REQUIRE(std::abs(row[6].get<double>()) < 1e-8);
  }
  CHECK(fs::exists(dir / "eg.report.json"));

  ScenarioConfig bad = c;
  bad.dt = 0.0;
  CHECK_THROWS_AS(run_scenario(bad), UsageError);
}

TEST_CASE("figure ids") {
  CHECK(parse_figure_id("2a") == FigureId::fig2a);
  CHECK(parse_figure_id("fig4d") == FigureId::fig4d);
  CHECK(parse_figure_id("3") == FigureId::fig3);
  CHECK_THROWS_AS(parse_figure_id("5"), UsageError);
  CHECK_THROWS_AS(parse_figure_id(""), UsageError);
  CHECK(figure_curves(FigureId::fig2a, "out").size() == 4);
  CHECK(figure_curves(FigureId::fig3, "out").size() == 3);
}

TEST_CASE("figure 2b") {
  const fs::path dir = scratch("fig2b");
  const auto files = run_figure(FigureId::fig2b, dir);
  REQUIRE(files.size() == 4);
  for (const auto& f : files) {
    CHECK(fs::exists(f));
    auto side = f;
    side.replace_extension(".json");
    const auto meta = nlohmann::json::parse(slurp(side));
    CHECK(meta["figure"] == "2b");
    CHECK(meta["columns"] == std::string(kTrajectoryHeader));
    CHECK(meta["config"]["initial_state"] == "gg");
  }
  const auto rows = csv_rows(slurp(dir / "fig2b_nofeedback.csv"));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(std::stod(rows[i][1]) == 1.0);
    REQUIRE(std::stod(rows[i][2]) == 0.0);
    REQUIRE(std::stod(rows[i][4]) == 0.0);
    REQUIRE(std::stod(rows[i][5]) == 0.0);
  }
  const std::string again = slurp(dir / "fig2b_eta0.5.csv");
  run_figure(FigureId::fig2b, dir);
  CHECK(slurp(dir / "fig2b_eta0.5.csv") == again);
}

TEST_CASE("figure 4d") {
  const fs::path dir = scratch("fig4d");
  run_figure(FigureId::fig4d, dir);
  const auto meta = nlohmann::json::parse(slurp(dir / "fig4d_eta1.json"));
  const auto& times = meta["features"]["sudden_change_times"];
  bool found = false;
  for (const auto& t : times) found = found || std::abs(t.get<double>() - 0.5) < 0.02;
  CHECK(found);
}

TEST_CASE("figure 3 wedge") {
  const fs::path dir = scratch("fig3");
  const auto files = run_figure(FigureId::fig3, dir);
  REQUIRE(files.size() == 3);
  const auto rows = csv_rows(slurp(dir / "fig3_nofeedback.csv"));
  REQUIRE(rows.size() > 2);
  CHECK(rows[0] == std::vector<std::string>{"t", "a", "b", "e", "separable"});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 5);
    REQUIRE(rows[i][4] == "1");
  }
  const auto eta1 = csv_rows(slurp(dir / "fig3_eta1.csv"));
  bool entangled = false;
  for (std::size_t i = 1; i < eta1.size(); ++i) entangled = entangled || eta1[i][4] == "0";
  CHECK(entangled);
  const auto meta = nlohmann::json::parse(slurp(dir / "fig3_eta0.5.json"));
  CHECK(meta["columns"] == std::string(kWedgeHeader));
}
