#include "fplab/reporting.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fplab {
namespace {

const Json& stage_field(const Json& stage, const char* field, const std::string& where) {
  if (!stage.contains(field))
    throw ConfigError(where + "/" + field, "missing required field");
  return stage[field];
}

StageResult run_certify(const RunConfig& cfg, const Json& stage, const std::string&) {
  if (!cfg.certificate) throw ConfigError("/certificate", "certify needs a certificate");
  const int samples = stage.value("samples", 2000);
  const Verdict v = verify_certificate(*cfg.body, *cfg.certificate, samples, cfg.seed);
  StageResult out{"certify", v.pass, Json(), {}};
  out.data = Json{{"pass", v.pass},
                  {"worst_slack", v.worst_slack},
                  {"samples", v.samples},
                  {"counterexample", v.counterexample ? vec_to_json(*v.counterexample)
                                                      : Json(nullptr)}};
  return out;
}

StageResult run_covering(const RunConfig& cfg, const Json& stage, const std::string& where) {
  if (!cfg.certificate) throw ConfigError("/certificate", "covering needs a certificate");
  const double lambda = stage_field(stage, "lambda", where).get<double>();
  const int samples = stage.value("samples", 10000);
  const CoveringReport rep = check_covering(*cfg.body, *cfg.certificate, lambda, samples, cfg.seed);
  StageResult out{"covering", rep.pass, Json(), {}};
  out.data = Json{{"pass", rep.pass},
                  {"lambda", rep.params.lambda},
                  {"t", rep.params.t},
                  {"r", rep.params.r},
                  {"r_prime", rep.params.r_prime},
                  {"samples", rep.samples},
                  {"worst_distance_slack", rep.worst_distance_slack},
                  {"worst_membership_slack", rep.worst_membership_slack},
                  {"worst_chain_slack", rep.worst_chain_slack}};
  return out;
}

ThetaSequence make_theta(const RunConfig& cfg) { return ThetaSequence(cfg.body); }

MapPtr make_map(const RunConfig& cfg) {
  if (cfg.map_spec.is_null()) throw ConfigError("/map", "this stage needs a map");
  return map_from_json(cfg.map_spec, cfg.body);
}

StageResult run_perturb_fix(const RunConfig& cfg, const Json& stage, const std::string& where) {
  if (!cfg.certificate) throw ConfigError("/certificate", "perturb-fix needs a certificate");
  const double eps = stage_field(stage, "eps", where).get<double>();
  ThetaSequence theta = make_theta(cfg);
  FixedPointOptions opt;
  opt.metric_terms = cfg.theta_terms;
  opt.rng_seed = cfg.seed;
  opt.invariance_samples = stage.value("invariance_samples", 1000);
  opt.km_max_iter = stage.value("km_max_iter", 100000L);
  const PerturbationReport rep =
      build_fixed_point_perturbation(make_map(cfg), eps, *cfg.certificate, theta, opt);
  return StageResult{"perturb-fix", rep.all_pass(), rep.to_json(), {}};
}

StageResult run_perturb_drift(const RunConfig& cfg, const Json& stage, const std::string& where) {
  const double eps = stage_field(stage, "eps", where).get<double>();
  const double r = stage_field(stage, "r", where).get<double>();
  ThetaSequence theta = make_theta(cfg);
  DriftOptions opt;
  opt.metric_terms = cfg.theta_terms;
  opt.rng_seed = cfg.seed;
  const PerturbationReport rep =
      build_drift_perturbation(make_map(cfg), eps, r, theta, cfg.body, opt);
  return StageResult{"perturb-drift", rep.all_pass(), rep.to_json(), {}};
}

StageResult run_boundary_drift(const RunConfig& cfg, const Json& stage,
                               const std::string& where) {
  if (!cfg.certificate)
    throw ConfigError("/certificate", "boundary-drift needs a certificate");
  const double delta = stage_field(stage, "delta", where).get<double>();
  const int p = stage.value("p", 1);
  ThetaSequence theta = make_theta(cfg);
  BoundaryDriftOptions opt;
  opt.metric_terms = cfg.theta_terms;
  opt.rng_seed = cfg.seed;
  opt.boundary_tol = stage.value("boundary_tol", 1e-3);
  const PerturbationReport rep =
      build_boundary_drift(make_map(cfg), delta, p, theta, cfg.body, *cfg.certificate, opt);
  return StageResult{"boundary-drift", rep.all_pass(), rep.to_json(), {}};
}

StageResult run_orbit(const RunConfig& cfg, const Json& stage, const std::string& where) {
  const Vec start = vec_from_json(stage_field(stage, "start", where), where + "/start");
  const int steps = stage.value("steps", 100);
  const std::string scheme = stage.value("scheme", std::string("picard"));
  const MapPtr f = make_map(cfg);
  OrbitTrace trace;
  if (scheme == "picard") {
    trace = picard_orbit(*f, start, steps);
  } else if (scheme == "km") {
    trace = km_orbit(*f, start, steps);
  } else {
    throw ConfigError(where + "/scheme", "scheme must be 'picard' or 'km'");
  }
  StageResult out{"orbit", true, Json(), {}};
  out.data = Json{{"scheme", trace.scheme},
                  {"steps", steps},
                  {"final_residual", trace.residuals.back()},
                  {"final_boundary_distance", finite_or_tag(trace.boundary_distances.back())}};
  out.files.emplace_back("orbit.csv", orbit_csv(trace));
  return out;
}

StageResult run_lur(const RunConfig& cfg, const Json& stage, const std::string& where) {
  const Vec start = vec_from_json(stage_field(stage, "start", where), where + "/start");
  const double tol = stage.value("tol", 1e-6);
  const long k_budget = stage.value("k_budget", 10000L);
  const MapPtr f = make_map(cfg);
  const KmResult km = km_fixed_point(*f, start, stage.value("km_tol", 1e-9),
                                     stage.value("km_max_iter", 200000L));
  StageResult out{"lur", false, Json(), {}};
  if (!km.fixed_point) {
    out.data = Json{{"pass", false}, {"error", "no fixed point found by the averaged scheme"}};
    return out;
  }
  const ConvexityModulus modulus(cfg.body);
  const ContractionProfile profile(modulus, *km.fixed_point);
  const ConvergenceCertificate cert =
      iterate_to_fixed_point(*f, start, *km.fixed_point, profile, tol, k_budget);
  out.pass = cert.converged;
  std::ostringstream csv;
  csv << "milestone,k,r_before,r_after,alpha\n";
  for (size_t i = 0; i < cert.chain.size(); ++i) {
    const MilestoneRecord& m = cert.chain[i];
    csv << i << "," << m.k << "," << csv_double(m.r_before) << ","
        << csv_double(m.r_after) << "," << csv_double(m.alpha_used) << "\n";
  }
  out.data = Json{{"pass", cert.converged},
                  {"milestones", static_cast<int>(cert.chain.size())},
                  {"fixed_point", vec_to_json(*km.fixed_point)},
                  {"fixed_point_residual", km.residual},
                  {"final_distance", (cert.final_point - *km.fixed_point).norm()}};
  out.files.emplace_back("lur_milestones.csv", csv.str());
  return out;
}

}  // namespace

RunConfig parse_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
  RunConfig cfg;
  cfg.ambient_dim = j.value("ambient_dim", 8);
  if (cfg.ambient_dim < 1) throw ConfigError("/ambient_dim", "must be >= 1");
  cfg.theta_terms = j.value("theta_terms", 40);
  if (cfg.theta_terms < 1) throw ConfigError("/theta_terms", "must be >= 1");
  cfg.seed = j.value("seed", 0ULL);
  if (j.contains("body")) {
    cfg.body = body_from_json(j["body"], "/body");
    if (cfg.body->ambient_dim() != cfg.ambient_dim && j.contains("ambient_dim"))
      throw ConfigError("/body", "body dimension disagrees with /ambient_dim");
    cfg.ambient_dim = cfg.body->ambient_dim();
  }
  if (j.contains("map")) cfg.map_spec = j["map"];
  if (j.contains("certificate"))
    cfg.certificate = certificate_from_json(j["certificate"], "/certificate");
  if (j.contains("stages")) {
    if (!j["stages"].is_array()) throw ConfigError("/stages", "must be an array");
    cfg.stages = j["stages"];
  }
  if (j.contains("demo")) cfg.demo = j["demo"];
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("", std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

Json SuiteReport::to_json() const {
  Json st = Json::array();
  for (const StageResult& s : stages) st.push_back(Json{{"op", s.op}, {"report", s.data}});
  return Json{{"pass", pass}, {"stages", st}};
}

SuiteReport run_suite(const RunConfig& cfg, const std::string& only_op) {
  SuiteReport rep;
  int matched = 0;
  for (size_t i = 0; i < cfg.stages.size(); ++i) {
    const Json& stage = cfg.stages[i];
    const std::string where = "/stages/" + std::to_string(i);
    if (!stage.is_object() || !stage.contains("op") || !stage["op"].is_string())
      throw ConfigError(where + "/op", "each stage needs an 'op' string");
    const std::string op = stage["op"].get<std::string>();
    if (!only_op.empty() && op != only_op) continue;
    ++matched;
    if (op != "certify" && !cfg.body) throw ConfigError("/body", "this config needs a body");
    StageResult result;
    if (op == "certify") {
      if (!cfg.body) throw ConfigError("/body", "certify needs a body");
      result = run_certify(cfg, stage, where);
    } else if (op == "covering") {
      result = run_covering(cfg, stage, where);
    } else if (op == "perturb-fix") {
      result = run_perturb_fix(cfg, stage, where);
    } else if (op == "perturb-drift") {
      result = run_perturb_drift(cfg, stage, where);
    } else if (op == "boundary-drift") {
      result = run_boundary_drift(cfg, stage, where);
    } else if (op == "orbit") {
      result = run_orbit(cfg, stage, where);
    } else if (op == "lur") {
      result = run_lur(cfg, stage, where);
    } else {
      throw ConfigError(where + "/op", "unknown stage op '" + op + "'");
    }
    rep.pass = rep.pass && result.pass;
    rep.stages.push_back(std::move(result));
  }
  if (matched == 0 && !only_op.empty())
    throw ConfigError("/stages", "no stage of kind '" + only_op + "' in this config");
  return rep;
}

Mat random_rotation(Rng& rng, int d) {
  Mat G(d, d);
  std::normal_distribution<double> n01(0.0, 1.0);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) G(r, c) = n01(rng);
  Eigen::HouseholderQR<Mat> qr(G);
  Mat Q = qr.householderQ();
  const Mat R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < d; ++c)
    if (R(c, c) < 0.0) Q.col(c) *= -1.0;
  return Q;
}

MapPtr demo_seed_map(const BodyPtr& body, uint64_t seed) {
  Rng rng(seed);
  const int d = body->ambient_dim();
  const Mat Q = random_rotation(rng, d);
  const Vec shift = 0.3 * unit_vec(rng, d);
  return compose({projection_map(body), affine_map(Q, shift, body)});
}

SuiteReport run_demo_01law(const RunConfig& cfg) {
  if (!cfg.demo.is_object()) throw ConfigError("/demo", "demo-01law needs a demo object");
  const Json& d = cfg.demo;
  if (!d.contains("certified_body"))
    throw ConfigError("/demo/certified_body", "missing certified body");
  if (!d.contains("certificate"))
    throw ConfigError("/demo/certificate", "missing certificate for the certified body");
  if (!d.contains("unbounded_body"))
    throw ConfigError("/demo/unbounded_body", "missing unbounded body");
  const BodyPtr certified = body_from_json(d["certified_body"], "/demo/certified_body");
  const SBCertificate cert =
      certificate_from_json(d["certificate"], "/demo/certificate");
  const BodyPtr unbounded = body_from_json(d["unbounded_body"], "/demo/unbounded_body");
  const int batch = d.value("seed_maps", 20);
  const double eps = d.value("eps", 0.25);
  const double drift_eps = d.value("drift_eps", 0.5);
  std::vector<double> radii;
  if (d.contains("radii")) {
    for (const auto& rj : d["radii"]) radii.push_back(rj.get<double>());
  } else {
    radii = {1.0, 2.0, 4.0};
  }

  SuiteReport rep;
  StageResult stage{"demo-01law", true, Json(), {}};
  Json fixed_rows = Json::array();
  int fixed_found = 0;
  {
    ThetaSequence theta(certified);
    for (int i = 0; i < batch; ++i) {
      const MapPtr f = demo_seed_map(certified, cfg.seed * 1000 + i);
      FixedPointOptions opt;
      opt.rng_seed = cfg.seed * 1000 + i;
      opt.km_max_iter = d.value("km_max_iter", 100000L);
      const PerturbationReport pr = build_fixed_point_perturbation(f, eps, cert, theta, opt);
      bool found = false;
      double residual = kInf;
      for (const PostCheck& c : pr.checks)
        if (c.name == "km_fixed_point_found") {
          found = c.pass;
          residual = c.measured;
        }
      fixed_found += found ? 1 : 0;
      fixed_rows.push_back(Json{{"seed_map", i},
                                {"fixed_point_found", found},
                                {"km_residual", residual},
                                {"metric_upper", pr.metric_distance.upper()}});
      stage.pass = stage.pass && found;
    }
  }
  Json drift_rows = Json::array();
  int exclusions = 0;
  int drift_runs = 0;
  {
    ThetaSequence theta(unbounded);
    for (double r : radii) {
      for (int i = 0; i < batch; ++i) {
        const MapPtr f = demo_seed_map(unbounded, cfg.seed * 2000 + i);
        DriftOptions opt;
        opt.rng_seed = cfg.seed * 2000 + i;
        const PerturbationReport pr =
            build_drift_perturbation(f, drift_eps, r, theta, unbounded, opt);
        bool issued = false;
        for (const PostCheck& c : pr.checks)
          if (c.name == "exclusion_certificate") issued = c.pass;
        ++drift_runs;
        exclusions += issued ? 1 : 0;
        drift_rows.push_back(Json{{"seed_map", i}, {"r", r}, {"exclusion", issued}});
        stage.pass = stage.pass && issued;
      }
    }
  }
  stage.data = Json{{"pass", stage.pass},
                    {"fixed_point_runs", batch},
                    {"fixed_points_found", fixed_found},
                    {"fixed_point_rate", batch > 0 ? static_cast<double>(fixed_found) / batch : 1.0},
                    {"drift_runs", drift_runs},
                    {"exclusions_issued", exclusions},
                    {"fixed_point_details", fixed_rows},
                    {"drift_details", drift_rows}};
  rep.pass = stage.pass;
  rep.stages.push_back(std::move(stage));
  return rep;
}

void write_outputs(const SuiteReport& rep, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  {
    std::ofstream out(out_dir + "/report.json", std::ios::binary);
    out << rep.to_json().dump(2) << "\n";
  }
  for (size_t i = 0; i < rep.stages.size(); ++i) {
    for (const auto& [name, contents] : rep.stages[i].files) {
      std::ofstream out(out_dir + "/stage" + std::to_string(i) + "_" + name,
                        std::ios::binary);
      out << contents;
    }
  }
}

std::string orbit_csv(const OrbitTrace& trace) {
  std::ostringstream csv;
  const int d = trace.points.empty() ? 0 : static_cast<int>(trace.points[0].size());
  csv << "k";
  for (int i = 0; i < d; ++i) csv << ",x" << i;
  csv << ",residual,boundary_distance\n";
  for (size_t k = 0; k < trace.points.size(); ++k) {
    csv << k;
    for (int i = 0; i < d; ++i) csv << "," << csv_double(trace.points[k][i]);
    csv << "," << csv_double(trace.residuals[k]) << ","
        << csv_double(trace.boundary_distances[k]) << "\n";
  }
  return csv.str();
}

}  // namespace fplab
