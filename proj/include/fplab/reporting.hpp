#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fplab/constructions.hpp"
#include "fplab/lur.hpp"

namespace fplab {

/// One self-describing JSON config per run; every seed explicit.
struct RunConfig {
  int ambient_dim = 8;
  int theta_terms = 40;
  uint64_t seed = 0;
  BodyPtr body;  // null when the config only runs a demo
  Json map_spec;
  std::optional<SBCertificate> certificate;
  Json stages = Json::array();
  Json demo;
};

RunConfig parse_config(const Json& j);
RunConfig load_config_file(const std::string& path);

struct StageResult {
  std::string op;
  bool pass = false;
  Json data;
  /// (filename, contents) pairs, e.g. per-stage CSVs.
  std::vector<std::pair<std::string, std::string>> files;
};

struct SuiteReport {
  std::vector<StageResult> stages;
  bool pass = true;
  Json to_json() const;
};

/// Dispatches the config's stages (certify / covering / perturb-fix /
/// perturb-drift / boundary-drift / orbit / lur). An empty `only_op`
/// runs everything; otherwise only stages of that kind.
SuiteReport run_suite(const RunConfig& cfg, const std::string& only_op = "");

/// Side-by-side batch: fixed-point perturbations on a certified body
/// versus drift perturbations with growing exclusion radii on a body
/// with an unbounded-direction oracle.
SuiteReport run_demo_01law(const RunConfig& cfg);

/// Writes report.json and per-stage files under out_dir.
void write_outputs(const SuiteReport& rep, const std::string& out_dir);

Mat random_rotation(Rng& rng, int d);

/// Deterministic seed map for demo batches: pi_C after a seeded rotation
/// plus a small shift.
MapPtr demo_seed_map(const BodyPtr& body, uint64_t seed);

std::string orbit_csv(const OrbitTrace& trace);

}  // namespace fplab
