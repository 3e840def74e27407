#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "cal/config.hpp"
#include "cal/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kBase = R"({
  "parameters": {"derived": {"theta": 1, "mu": 1, "nu": 1, "gamma": 1, "k": 1}},
  "run": {"kind": "analyze", "T": 1}
})";

std::string error_of(const std::string& text) {
  try {
    cal::parse_config(text, ".", "cfg.json");
  } catch (const cal::ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(CAL_TEST_SCRATCH) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + CAL_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const fs::path& dir, const json& j) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

}  // namespace

TEST_CASE("config parses the minimal document") {
  const auto c = cal::parse_config(kBase);
  CHECK(c.run.kind == cal::ExperimentKind::Analyze);
  CHECK(c.parameters.derived->theta == 1);
  CHECK(c.run.h == 1e-3);
  CHECK(c.potential.kind == "zero");
  CHECK_FALSE(c.schedule.has_value());
}

TEST_CASE("config errors carry source and line") {
  const std::string bad_theta = R"({
  "parameters": {"derived": {"theta": 1, "mu": 1, "nu": 1, "gamma": 1, "k": 1}},
  "run": {
    "kind": "analyze",
    "T": -1
  }
})";
  const std::string msg = error_of(bad_theta);
  CHECK(msg.find("cfg.json:5:") == 0);
  CHECK(msg.find("run.T") != std::string::npos);

  const std::string syntax = "{\n  \"run\": {\n    \"T\": 1,,\n  }\n}";
  CHECK(error_of(syntax).find("cfg.json:3:") == 0);

  const std::string unknown = R"({
  "parameters": {"derived": {"theta": 1, "mu": 1, "nu": 1, "gamma": 1, "k": 1}},
  "run": {"kind": "analyze", "T": 1, "colour": 3}
})";
  const std::string um = error_of(unknown);
  CHECK(um.find("cfg.json:3:") == 0);
  CHECK(um.find("colour") != std::string::npos);
}

TEST_CASE("config validation") {
  json both = json::parse(kBase);
  both["parameters"]["raw"] = {{"alpha", 0}, {"beta", 0}, {"gamma1", 1}, {"gamma2", 1}, {"k", 1}, {"theta", 1}};
  CHECK_THROWS_AS(cal::parse_config(both.dump()), cal::ConfigError);

  json none = json::parse(kBase);
  none["parameters"] = json::object();
  CHECK_THROWS_AS(cal::parse_config(none.dump()), cal::ConfigError);

  json theta = json::parse(kBase);
  theta["parameters"]["derived"]["theta"] = 0;
  CHECK_THROWS_AS(cal::parse_config(theta.dump()), cal::ConfigError);

  json h = json::parse(kBase);
  h["run"]["h"] = 0;
  CHECK_THROWS_AS(cal::parse_config(h.dump()), cal::ConfigError);

  json kind = json::parse(kBase);
  kind["run"]["kind"] = "dance";
  CHECK_THROWS_AS(cal::parse_config(kind.dump()), cal::ConfigError);

  json sched = json::parse(kBase);
  sched["schedule"] = {{"breakpoints", {1}}, {"period_A", 1}, {"period_B", 1}, {"count", 1}};
  CHECK_THROWS_AS(cal::parse_config(sched.dump()), cal::ConfigError);

  json tail = json::parse(kBase);
  tail["run"]["T"] = 3;
  tail["schedule"] = {{"breakpoints", {1, 2}}, {"tail", "B"}};
  CHECK_THROWS_AS(cal::parse_config(tail.dump()), cal::ConfigError);
  tail["schedule"]["tail"] = "A";
  CHECK_NOTHROW(cal::parse_config(tail.dump()));

  json flow = json::parse(kBase);
  flow["run"]["kind"] = "compare-gradient-flow";
  CHECK_THROWS_AS(cal::parse_config(flow.dump()), cal::ConfigError);

  CHECK_THROWS_AS(cal::parse_config("[1, 2]"), cal::ConfigError);
}

TEST_CASE("config echo round-trips") {
  for (const char* name : {"analyze", "simulate", "gradient_flow", "action_oracle", "reset_experiment"}) {
    CAPTURE(name);
    const auto c = cal::load_config(fs::path(CAL_SOURCE_DIR) / "configs" / (std::string(name) + ".json"));
    const auto echo = cal::to_json(c).dump();
    CHECK(cal::parse_config(echo) == c);
    CHECK(cal::to_json(cal::parse_config(echo)).dump() == echo);
  }
}

TEST_CASE("cli: exit codes") {
  const fs::path dir = scratch("exit_codes");
  CHECK(run_cli("analyze --config \"" + (fs::path(CAL_SOURCE_DIR) / "configs/analyze.json").string() +
                "\" --out \"" + (dir / "ok").string() + "\"") == 0);
  CHECK(fs::exists(dir / "ok" / "report.json"));
  CHECK(fs::exists(dir / "ok" / "timing.json"));

  CHECK(run_cli("analyze --config \"" + (dir / "missing.json").string() + "\"") == 1);
  std::ofstream(dir / "broken.json") << "{ not json";
  CHECK(run_cli("analyze --config \"" + (dir / "broken.json").string() + "\"") == 1);
  CHECK(run_cli("frobnicate") == 1);
  CHECK(run_cli("simulate") == 1);

  // Unstable coefficients blow up: numerical failure.
  json unstable = {{"parameters", {{"derived", {{"theta", 1}, {"mu", 1}, {"nu", 1}, {"gamma", 0}, {"k", -2}}}}},
                   {"run", {{"kind", "simulate"}, {"T", 2000}, {"h", 0.01}, {"cauchy", {{"q0", {1}}}},
                            {"output_dir", (dir / "unstable").string()}}}};
  CHECK(run_cli("simulate --config \"" + write_config(dir, unstable).string() + "\"") == 2);
  const json report = json::parse(slurp(dir / "unstable" / "report.json"));
  CHECK(report["status"] == "non_finite");
  CHECK(report["blow_up_time"].get<double>() > 0);
  CHECK(report["max_root_real_part"].get<double>() > 0);
}

TEST_CASE("cli: analyze report") {
  const fs::path dir = scratch("analyze");
  json cfg = json::parse(kBase);
  cfg["run"]["output_dir"] = (dir / "out").string();
  REQUIRE(run_cli("analyze --config \"" + write_config(dir, cfg).string() + "\"") == 0);
  const json r = json::parse(slurp(dir / "out" / "report.json"));
  // theta = mu = nu = gamma = k = 1: b = 2, c = 1, d = 0, e = 1.
  CHECK(r["charpoly"]["b"] == 2.0);
  CHECK(r["charpoly"]["c"] == 1.0);
  CHECK(r["charpoly"]["d"] == 0.0);
  CHECK(r["charpoly"]["e"] == 1.0);
  CHECK(r["hurwitz_stable"] == false);
  CHECK(r["roots"].size() == 4);
  CHECK(r["schema_version"] == 1);
}

TEST_CASE("cli: zero data gives the zero trajectory") {
  const fs::path dir = scratch("zero");
  json cfg = {{"parameters", {{"derived", {{"theta", 1}, {"mu", 1}, {"nu", 1}, {"gamma", 1}, {"k", 1}}}}},
              {"run", {{"kind", "simulate"}, {"T", 1}, {"h", 0.01}, {"cauchy", {{"q0", {0, 0}}}},
                       {"output_dir", (dir / "out").string()}}}};
  REQUIRE(run_cli("simulate --config \"" + write_config(dir, cfg).string() + "\"") == 0);
  const json r = json::parse(slurp(dir / "out" / "report.json"));
  CHECK(r["trajectory"]["action"] == 0.0);
  CHECK(r["trajectory"]["samples"] == 101);
  std::istringstream csv(slurp(dir / "out" / "trajectory.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "t,q_1,q_2,dq_1,dq_2,d2q_1,d2q_2,d3q_1,d3q_2");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    std::istringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');
    while (std::getline(cells, cell, ',')) CHECK(std::stod(cell) == 0.0);
  }
  CHECK(rows == 101);
}

TEST_CASE("cli: reruns are byte-identical") {
  const fs::path dir = scratch("determinism");
  const std::string cfg = (fs::path(CAL_SOURCE_DIR) / "configs/simulate.json").string();
  const std::string cmd = "simulate --config \"" + cfg + "\" --step 0.01 --out \"" + (dir / "run").string() + "\"";
  const char* files[] = {"report.json", "trajectory.csv", "trajectory.meta.json", "plots/trajectory_q1.dat"};
  REQUIRE(run_cli(cmd) == 0);
  std::vector<std::string> first;
  for (const char* f : files) first.push_back(slurp(dir / "run" / f));
  fs::remove_all(dir / "run");
  REQUIRE(run_cli(cmd) == 0);
  for (std::size_t i = 0; i < first.size(); ++i) {
    CAPTURE(files[i]);
    CHECK_FALSE(first[i].empty());
    CHECK(slurp(dir / "run" / files[i]) == first[i]);
  }
}

TEST_CASE("cli: sweep runs several configs") {
  const fs::path dir = scratch("sweep");
  json a = json::parse(kBase);
  a["run"]["output_dir"] = (dir / "a").string();
  json b = a;
  b["run"]["output_dir"] = (dir / "b").string();
  std::ofstream(dir / "a.json") << a.dump();
  std::ofstream(dir / "b.json") << b.dump();
  CHECK(run_cli("sweep --jobs 2 \"" + (dir / "a.json").string() + "\" \"" + (dir / "b.json").string() + "\"") == 0);
  const json ra = json::parse(slurp(dir / "a" / "report.json"));
  const json rb = json::parse(slurp(dir / "b" / "report.json"));
  CHECK(ra["roots"] == rb["roots"]);
  CHECK(ra["config"]["run"]["output_dir"] != rb["config"]["run"]["output_dir"]);
  CHECK(run_cli("sweep \"" + (dir / "a.json").string() + "\" \"" + (dir / "nope.json").string() + "\"") == 1);
}
