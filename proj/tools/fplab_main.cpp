#include <CLI11.hpp>
#include <chrono>
#include <iostream>

#include "fplab/reporting.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<uint64_t> seed;
  std::optional<int> theta_terms;
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config_path, "run config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--out", args.out_dir, "output directory");
  sub->add_option("--seed", args.seed, "override the config seed");
  sub->add_option("--theta-terms", args.theta_terms, "override the metric truncation");
}

int run(const CommonArgs& args, const std::string& op) {
  using clock = std::chrono::steady_clock;
  try {
    fplab::RunConfig cfg = fplab::load_config_file(args.config_path);
    if (args.seed) cfg.seed = *args.seed;
    if (args.theta_terms) cfg.theta_terms = *args.theta_terms;
    const auto t0 = clock::now();
    const fplab::SuiteReport rep =
        op == "demo-01law" ? fplab::run_demo_01law(cfg) : fplab::run_suite(cfg, op);
    const double secs =
        std::chrono::duration<double>(clock::now() - t0).count();
    fplab::write_outputs(rep, args.out_dir);
    for (const auto& s : rep.stages)
      std::cout << (s.pass ? "[pass] " : "[FAIL] ") << s.op << "\n";
    std::cout << (rep.pass ? "PASS" : "FAIL") << " (" << rep.stages.size()
              << " stage(s), " << secs << " s) -> " << args.out_dir << "/report.json\n";
    return rep.pass ? 0 : 1;
  } catch (const fplab::ConfigError& e) {
    std::cerr << "config error at '" << e.pointer << "': " << e.what() << "\n";
    return 2;
  } catch (const fplab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for nonexpansive self-maps of convex bodies"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> subs = {
      {"certify", "check a somewhat-boundedness certificate against a body"},
      {"perturb-fix", "build the fixed-point-creating perturbation and check it"},
      {"perturb-drift", "build the fixed-point-destroying drift and check it"},
      {"orbit", "record a picard or km orbit as CSV"},
      {"lur", "milestone convergence of iterates toward a fixed point"},
      {"demo-01law", "fixed points on a certified body vs exclusions on an unbounded one"},
      {"suite", "run every stage in the config"},
  };
  std::vector<std::unique_ptr<CommonArgs>> all_args;
  std::vector<std::pair<CLI::App*, std::string>> handlers;
  for (const auto& [name, desc] : subs) {
    CLI::App* sub = app.add_subcommand(name, desc);
    all_args.push_back(std::make_unique<CommonArgs>());
    add_common(sub, *all_args.back());
    handlers.emplace_back(sub, name == "suite" ? "" : name);
  }

  CLI11_PARSE(app, argc, argv);
  for (size_t i = 0; i < handlers.size(); ++i)
    if (handlers[i].first->parsed()) return run(*all_args[i], handlers[i].second);
  return 2;
}
