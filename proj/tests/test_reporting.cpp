#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "fplab/reporting.hpp"

using namespace fplab;

namespace {

Json tube_pipeline_config() {
  return Json::parse(R"({
    "ambient_dim": 4,
    "theta_terms": 40,
    "seed": 3,
    "body": {"kind": "tube", "subspace": [[1, 0, 0, 0]], "radius": 1.0},
    "map": {"kind": "affine", "offset": [1, 0, 0, 0]},
    "certificate": {"x0": [0, 0, 0, 0], "subspace": [[1, 0, 0, 0]],
                    "alpha": 1.0, "beta": 1.0},
    "stages": [
      {"op": "certify", "samples": 400},
      {"op": "covering", "lambda": 1.0, "samples": 400},
      {"op": "perturb-fix", "eps": 0.5, "invariance_samples": 200},
      {"op": "boundary-drift", "delta": 0.2, "p": 1},
      {"op": "orbit", "start": [0, 0, 0, 0], "steps": 25, "scheme": "picard"}
    ]
  })");
}

std::string report_string(const SuiteReport& rep) { return rep.to_json().dump(2); }

}  // namespace

TEST_CASE("config rejects unknown body kinds with a json pointer") {
  Json cfg = tube_pipeline_config();
  cfg["body"]["kind"] = "wedge";
  try {
    parse_config(cfg);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.pointer == "/body/kind");
  }
}

TEST_CASE("config rejects stages without an op") {
  Json cfg = tube_pipeline_config();
  cfg["stages"][0].erase("op");
  const RunConfig parsed = parse_config(cfg);
  try {
    run_suite(parsed);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.pointer == "/stages/0/op");
  }
}

TEST_CASE("certify-only run yields a single verdict report") {
  const RunConfig cfg = parse_config(tube_pipeline_config());
  const SuiteReport rep = run_suite(cfg, "certify");
  REQUIRE(rep.stages.size() == 1);
  CHECK(rep.stages[0].op == "certify");
  CHECK(rep.stages[0].data.at("pass").get<bool>());
  CHECK(rep.pass);
}

TEST_CASE("filtering on an absent stage kind is a config error") {
  const RunConfig cfg = parse_config(tube_pipeline_config());
  CHECK_THROWS_AS(run_suite(cfg, "lur"), ConfigError);
}

TEST_CASE("full tube pipeline: every stage verdict present and passing") {
  const RunConfig cfg = parse_config(tube_pipeline_config());
  const SuiteReport rep = run_suite(cfg);
  REQUIRE(rep.stages.size() == 5);
  CHECK(rep.pass);
  const std::vector<std::string> expect = {"certify", "covering", "perturb-fix",
                                           "boundary-drift", "orbit"};
  for (size_t i = 0; i < expect.size(); ++i) {
    CHECK(rep.stages[i].op == expect[i]);
    CHECK(rep.stages[i].pass);
  }
  // orbit stage carries its CSV
  REQUIRE(rep.stages[4].files.size() == 1);
  CHECK(rep.stages[4].files[0].first == "orbit.csv");
  CHECK(rep.stages[4].files[0].second.find("k,x0,x1,x2,x3,residual,boundary_distance") == 0);
}

TEST_CASE("suite reports are byte-identical across reruns") {
  const RunConfig cfg = parse_config(tube_pipeline_config());
  const SuiteReport a = run_suite(cfg);
  const SuiteReport b = run_suite(cfg);
  CHECK(report_string(a) == report_string(b));
  REQUIRE(a.stages.size() == b.stages.size());
  for (size_t i = 0; i < a.stages.size(); ++i) {
    REQUIRE(a.stages[i].files.size() == b.stages[i].files.size());
    for (size_t j = 0; j < a.stages[i].files.size(); ++j)
      CHECK(a.stages[i].files[j].second == b.stages[i].files[j].second);
  }
}

TEST_CASE("lur stage produces a milestone csv on a contracting map") {
  const Json cfg_json = Json::parse(R"({
    "ambient_dim": 3,
    "seed": 5,
    "body": {"kind": "ball", "center": [0, 0, 0], "radius": 1.0},
    "map": {"kind": "affine",
            "matrix": [[0.5, 0, 0], [0, 0.5, 0], [0, 0, 0.5]],
            "offset": [0.45, 0, 0]},
    "stages": [{"op": "lur", "start": [0, 0.9, 0], "tol": 1e-6}]
  })");
  const SuiteReport rep = run_suite(parse_config(cfg_json));
  REQUIRE(rep.stages.size() == 1);
  CHECK(rep.pass);
  CHECK(rep.stages[0].data.at("milestones").get<int>() >= 1);
  REQUIRE(rep.stages[0].files.size() == 1);
  CHECK(rep.stages[0].files[0].second.find("milestone,k,r_before,r_after,alpha") == 0);
}

TEST_CASE("orbit csv renders doubles round-trip safe") {
  const std::string s = csv_double(1.0 / 3.0);
  CHECK(std::stod(s) == 1.0 / 3.0);
  CHECK(csv_double(kInf) == "inf");
}

TEST_CASE("demo batch: fixed points on the certified side, exclusions opposite") {
  const Json cfg_json = Json::parse(R"({
    "seed": 9,
    "demo": {
      "certified_body": {"kind": "tube", "subspace": [[1, 0, 0, 0]], "radius": 1.0},
      "certificate": {"x0": [0, 0, 0, 0], "subspace": [[1, 0, 0, 0]],
                      "alpha": 1.0, "beta": 1.0},
      "unbounded_body": {"kind": "full_space", "dim": 8},
      "seed_maps": 2,
      "eps": 0.5,
      "drift_eps": 0.5,
      "radii": [1.0, 2.0]
    }
  })");
  const SuiteReport rep = run_demo_01law(parse_config(cfg_json));
  REQUIRE(rep.stages.size() == 1);
  const Json& data = rep.stages[0].data;
  CHECK(data.at("fixed_point_rate").get<double>() == 1.0);
  CHECK(data.at("exclusions_issued").get<int>() == 4);
  CHECK(rep.pass);
}

TEST_CASE("demo with an empty seed batch succeeds vacuously") {
  const Json cfg_json = Json::parse(R"({
    "seed": 9,
    "demo": {
      "certified_body": {"kind": "tube", "subspace": [[1, 0, 0, 0]], "radius": 1.0},
      "certificate": {"x0": [0, 0, 0, 0], "subspace": [[1, 0, 0, 0]],
                      "alpha": 1.0, "beta": 1.0},
      "unbounded_body": {"kind": "full_space", "dim": 8},
      "seed_maps": 0,
      "radii": []
    }
  })");
  const SuiteReport rep = run_demo_01law(parse_config(cfg_json));
  CHECK(rep.pass);
  CHECK(rep.stages[0].data.at("fixed_point_runs").get<int>() == 0);
}

TEST_CASE("write_outputs lays down report.json plus stage files") {
  namespace fs = std::filesystem;
  const RunConfig cfg = parse_config(tube_pipeline_config());
  const SuiteReport rep = run_suite(cfg, "orbit");
  const std::string dir = (fs::temp_directory_path() / "fplab_report_test").string();
  fs::remove_all(dir);
  write_outputs(rep, dir);
  CHECK(fs::exists(dir + "/report.json"));
  CHECK(fs::exists(dir + "/stage0_orbit.csv"));
  std::ifstream in(dir + "/report.json");
  Json parsed;
  in >> parsed;
  CHECK(parsed.at("pass").get<bool>());
  fs::remove_all(dir);
}

#ifdef FPLAB_CLI_PATH
TEST_CASE("cli exit codes: 0 on pass, 2 on schema violations") {
  namespace fs = std::filesystem;
  const std::string dir = (fs::temp_directory_path() / "fplab_cli_test").string();
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream out(dir + "/ok.json");
    Json cfg = tube_pipeline_config();
    cfg["stages"] = Json::array({Json{{"op", "certify"}, {"samples", 200}}});
    out << cfg.dump();
  }
  {
    std::ofstream out(dir + "/bad.json");
    Json cfg = tube_pipeline_config();
    cfg["body"]["kind"] = "wedge";
    out << cfg.dump();
  }
  const std::string base = std::string(FPLAB_CLI_PATH);
  const auto exit_code = [&](const std::string& cmd) {
    const int raw = std::system(cmd.c_str());
    return WEXITSTATUS(raw);
  };
  CHECK(exit_code(base + " certify --config " + dir + "/ok.json --out " + dir +
                  "/out > /dev/null 2>&1") == 0);
  CHECK(exit_code(base + " certify --config " + dir + "/bad.json --out " + dir +
                  "/out2 > /dev/null 2>&1") == 2);
  CHECK(fs::exists(dir + "/out/report.json"));
  fs::remove_all(dir);
}
#endif
