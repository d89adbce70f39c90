#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "evotherm/harness.hpp"

using namespace evotherm;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kMinimal = R"({"grid": {"dimension": 1, "cells": [8]}})";

fs::path temp_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("evotherm_test_" + tag);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("minimal scenario gets the documented defaults") {
  const Scenario sc = parse_scenario(kMinimal);
  CHECK(sc.time.nu == 1.0);
  CHECK(sc.time.dt == 1e-3);
  CHECK(sc.time.steps == 1000);
  CHECK(sc.variant == Variant::TwoTemperature);
  CHECK(sc.material.alpha == 1.0);
  CHECK(sc.sources.empty());
  CHECK(!sc.material.beta.has_value());
}

TEST_CASE("parse failures carry the violated constraint") {
  CHECK_THROWS_AS(parse_scenario("not json"), ParseError);
  CHECK_THROWS_AS(parse_scenario("[1,2]"), ParseError);
  CHECK_THROWS_AS(parse_scenario(R"({"grid": {"dimension": 1, "cells": [8]}, "x": 1})"),
                  ParseError);
  CHECK_THROWS_WITH_AS(
      parse_scenario(
          R"({"grid": {"dimension": 1, "cells": [8]}, "material": {"alpha": -1}})"),
      "alpha must be positive", ValidationError);
  CHECK_THROWS_WITH_AS(
      parse_scenario(
          R"({"grid": {"dimension": 1, "cells": [8]}, "variant": "two_strain"})"),
      "beta required for two_strain", ValidationError);
  CHECK_THROWS_AS(parse_scenario(R"({"grid": {"dimension": 1}})"), ParseError);
  CHECK_THROWS_AS(
      parse_scenario(
          R"({"grid": {"dimension": 1, "cells": [8]}, "sources": [{"field": "X"}]})"),
      ValidationError);
  CHECK_THROWS_AS(
      parse_scenario(
          R"({"grid": {"dimension": 1, "cells": [8]}, "sources": [{"profile": "wiggle"}]})"),
      ParseError);
}

TEST_CASE("bundled scenario parses and passes its own report") {
  const Scenario sc =
      load_scenario(std::string(EVOTHERM_SCENARIO_DIR) + "/default_2T_1d.json");
  CHECK(sc.name == "default_2T_1d");
  const fs::path out = temp_dir("bundled");
  CHECK(run_scenario(sc, out.string(), false) == 0);
  CHECK(fs::exists(out / "trajectory.csv"));
  CHECK(fs::exists(out / "recovered.csv"));
  CHECK(fs::exists(out / "report.json"));
  const std::string rep = slurp(out / "report.json");
  CHECK(rep.find("\"all_pass\": true") != std::string::npos);
  CHECK(rep.find("\"threshold\"") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("trajectory CSV has the documented header and row shape") {
  Scenario sc = parse_scenario(kMinimal);
  sc.time.steps = 3;
  const BlockSystem sys = assemble(sc.variant, sc.grid, sc.material);
  const Trajectory traj =
      solve(sys, [&](double) { return Vector(sys.size(), 0.0); }, sc.time);
  const std::string csv = trajectory_csv(traj, sys, {});
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  CHECK(line == "step,time,field,component_index,value");
  std::size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 3 * sys.size());
  CHECK(csv.find(",v,") != std::string::npos);
  CHECK(csv.find(",theta,") != std::string::npos);

  const std::string sel = trajectory_csv(traj, sys, {"theta"});
  CHECK(sel.find(",v,") == std::string::npos);
  CHECK(sel.find(",theta,") != std::string::npos);
}

TEST_CASE("identical scenarios produce byte-identical outputs") {
  const Scenario sc =
      load_scenario(std::string(EVOTHERM_SCENARIO_DIR) + "/default_2T_1d.json");
  const fs::path o1 = temp_dir("det1"), o2 = temp_dir("det2");
  REQUIRE(run_scenario(sc, o1.string(), false) == 0);
  REQUIRE(run_scenario(sc, o2.string(), false) == 0);
  for (const char* f : {"trajectory.csv", "recovered.csv", "report.json"})
    CHECK(slurp(o1 / f) == slurp(o2 / f));
  fs::remove_all(o1);
  fs::remove_all(o2);
}

TEST_CASE("dry run writes the report only") {
  const Scenario sc = parse_scenario(kMinimal);
  const fs::path out = temp_dir("dry");
  CHECK(run_scenario(sc, out.string(), true) == 0);
  CHECK(fs::exists(out / "report.json"));
  CHECK(!fs::exists(out / "trajectory.csv"));
  fs::remove_all(out);
}

TEST_CASE("an indefinite elastic tensor fails verification with exit 2") {
  Scenario sc = parse_scenario(kMinimal);
  sc.material.c_elast = -1.0;
  const fs::path out = temp_dir("indef");
  CHECK(run_scenario(sc, out.string(), false) == 2);
  const std::string rep = slurp(out / "report.json");
  CHECK(rep.find("\"valid\": false") != std::string::npos);
  CHECK(rep.find("\"pass\": false") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("limit studies shrink monotonically toward the classical model") {
  Scenario sc = parse_scenario(kMinimal);
  sc.time.steps = 300;
  SourceSpec pulse;
  pulse.field = "Q";
  pulse.profile = SourceSpec::Profile::GaussianPulse;
  pulse.center = {0.5};
  pulse.width = 0.1;
  pulse.duration = 0.2;
  sc.sources.push_back(pulse);

  for (const char* kind : {"alpha_limit", "eps_limit"}) {
    const StudyResult r = run_study(kind, sc, {1e-1, 1e-2, 1e-3});
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[0].deviation > r.rows[1].deviation);
    CHECK(r.rows[1].deviation > r.rows[2].deviation);
    CHECK(!r.monotone_warning);
    const std::string csv = r.to_csv();
    CHECK(csv.rfind("label,deviation,ratio,warning\n", 0) == 0);
  }
}

TEST_CASE("dt refinement shows first-order self-convergence") {
  Scenario sc = parse_scenario(kMinimal);
  sc.time.steps = 250;
  SourceSpec pulse;
  pulse.field = "Q";
  pulse.profile = SourceSpec::Profile::GaussianPulse;
  pulse.center = {0.5};
  pulse.width = 0.1;
  pulse.duration = 0.2;
  sc.sources.push_back(pulse);

  const StudyResult r = run_study("dt_refine", sc, {4e-3, 2e-3, 1e-3});
  REQUIRE(r.rows.size() == 3);
  for (std::size_t i = 1; i < 3; ++i) {
    CHECK(r.rows[i].ratio > 1.7);
    CHECK(r.rows[i].ratio < 2.3);
  }
}

TEST_CASE("model comparison reports one row per alternative model") {
  Scenario sc = parse_scenario(kMinimal);
  sc.time.steps = 100;
  const StudyResult r = run_study("model_compare", sc, {});
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[0].label == "two_strain");
  CHECK(r.rows[1].label == "yosida");
  CHECK(r.rows[2].label == "classical_limit");
}

TEST_CASE("study input validation") {
  const Scenario sc = parse_scenario(kMinimal);
  CHECK_THROWS_AS(run_study("alpha_limit", sc, {}), ValidationError);
  CHECK_THROWS_AS(run_study("alpha_limit", sc, {1e-3, 1e-2}), ValidationError);
  CHECK_THROWS_AS(run_study("alpha_limit", sc, {1e-1, -1e-2}), ValidationError);
  CHECK_THROWS_AS(run_study("bogus", sc, {1.0}), ValidationError);
}

TEST_CASE("study respects the thread cap environment variable") {
  Scenario sc = parse_scenario(kMinimal);
  sc.time.steps = 50;
  setenv("EVOTHERM_THREADS", "1", 1);
  const StudyResult serial = run_study("alpha_limit", sc, {1e-1, 1e-2});
  setenv("EVOTHERM_THREADS", "4", 1);
  const StudyResult parallel = run_study("alpha_limit", sc, {1e-1, 1e-2});
  unsetenv("EVOTHERM_THREADS");
  REQUIRE(serial.rows.size() == parallel.rows.size());
  for (std::size_t i = 0; i < serial.rows.size(); ++i)
    CHECK(serial.rows[i].deviation == parallel.rows[i].deviation);
}
