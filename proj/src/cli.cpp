#include "invopt/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "invopt/harness.hpp"
#include "invopt/verify.hpp"

namespace invopt {

namespace {

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

std::string default_agg_path(const std::string& out) {
  const auto dot = out.rfind('.');
  const auto slash = out.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return out + ".agg.csv";
  }
  return out.substr(0, dot) + ".agg" + out.substr(dot);
}

std::uint64_t seed_or_env(const CLI::Option* opt, std::uint64_t flag_value) {
  if (opt->count() > 0) return flag_value;
  if (const char* env = std::getenv("INVOPT_SEED")) {
    try {
      std::size_t used = 0;
      const std::uint64_t v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument(std::string("INVOPT_SEED is not an integer: ") + env);
  }
  return flag_value;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Inverse optimization: recover objective weights from observed optima"};
  app.require_subcommand(1, 1);

  // run
  ExperimentConfig cfg;
  std::string family_str = "lp";
  std::string raw_path, agg_path;
  std::size_t threads = 0;
  bool no_timing = false;
  std::uint64_t run_seed = 42;
  auto* run = app.add_subcommand("run", "run an experiment and write CSVs");
  run->add_option("--family", family_str, "lp | scheduling")->check(CLI::IsMember({"lp", "scheduling"}));
  run->add_option("--d", cfg.d, "weight dimension");
  run->add_option("--J", cfg.J, "LP constraint rows");
  run->add_option("--r-max", cfg.r_max, "LP axis-scale range");
  run->add_option("--N", cfg.N, "instances per dataset");
  run->add_option("--iters", cfg.K, "iterations / evaluations per method");
  run->add_option("--trials", cfg.trials, "number of trials");
  run->add_option("--methods", cfg.methods, "psgd2,psgdp,upa,rpa,chan")->delimiter(',');
  auto* run_seed_opt = run->add_option("--seed", run_seed, "base seed (fallback: INVOPT_SEED)");
  // Checked after parsing so unknown flags are reported before missing ones.
  run->add_option("--out", raw_path, "raw per-iteration CSV (required)");
  run->add_option("--agg-out", agg_path, "worst-case CSV (default: <out>.agg.csv)");
  run->add_option("--experiment", cfg.experiment, "experiment label in the raw CSV");
  run->add_option("--threads", threads, "worker threads (0 = all cores)");
  run->add_option("--fw-iters", cfg.chan.fw_iters, "CHAN Frank-Wolfe iteration cap");
  run->add_option("--fw-tol", cfg.chan.fw_tol, "CHAN Frank-Wolfe gap tolerance");
  run->add_flag("--no-timing", no_timing, "write elapsed_ms = 0 (byte-stable output)");
  run->add_flag("--allow-large", cfg.allow_large, "permit scheduling with d > 6");

  // verify
  VerifyConfig vcfg;
  std::string vfamily = "lp";
  std::uint64_t verify_seed = 7;
  auto* verify = app.add_subcommand("verify", "run the lemma property suites");
  verify->add_option("--family", vfamily, "lp | scheduling | points")
      ->check(CLI::IsMember({"lp", "scheduling", "points"}));
  verify->add_option("--d", vcfg.d, "weight dimension");
  auto* verify_seed_opt = verify->add_option("--seed", verify_seed, "seed (fallback: INVOPT_SEED)");
  verify->add_option("--instances", vcfg.instances, "certified datasets to test");
  verify->add_option("--max-n", vcfg.max_N, "largest dataset size");
  verify->add_option("--J", vcfg.J, "LP rows");
  verify->add_option("--r-max", vcfg.r_max, "LP axis-scale range");
  verify->add_option("--points", vcfg.points, "points per point-set instance");
  verify->add_option("--psi-draws", vcfg.psi_draws, "draws for the Psi rate");
  verify->add_option("--lemma45-samples", vcfg.lemma45_samples, "probes per dataset");
  verify->add_option("--lemma46-samples", vcfg.lemma46_samples, "probes per dataset");
  verify->add_option("--bound-cap", vcfg.bound_cap, "largest finite bound to run");
  verify->add_option("--descent-iters", vcfg.descent_iters, "PSGD2 length when the bound is not run");

  // project
  std::vector<double> vec;
  double shift = 0.0;
  auto* project = app.add_subcommand("project", "project a vector onto the simplex");
  project->add_option("--weights", vec, "comma-separated vector")->required()->delimiter(',');
  project->add_option("--shift", shift, "per-coordinate simplex offset");

  // solve-forward
  std::string instance_path;
  std::vector<double> fw_weights;
  auto* solve = app.add_subcommand("solve-forward", "solve one instance at given weights");
  solve->add_option("--instance", instance_path, "instance JSON file")->required();
  solve->add_option("--weights", fw_weights, "comma-separated weights")->required()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return kExitOk;
    const CLI::App* failed = &app;
    for (const auto* sub : app.get_subcommands()) failed = sub;
    err << failed->help();
    return kExitInvalid;
  }

  try {
    if (*run) {
      if (raw_path.empty()) throw std::invalid_argument("run: --out is required");
      cfg.family = parse_family(family_str);
      cfg.seed = seed_or_env(run_seed_opt, run_seed);
      cfg.timing = !no_timing;
      cfg.validate();
      const auto records = run_experiment(cfg, threads);
      write_raw_csv(cfg, records, raw_path);
      const std::string agg = agg_path.empty() ? default_agg_path(raw_path) : agg_path;
      write_csv(aggregate_worst_case(cfg, records), agg);
      out << "wrote " << raw_path << " and " << agg << '\n';
      return kExitOk;
    }
    if (*verify) {
      vcfg.family = parse_family(vfamily);
      vcfg.seed = seed_or_env(verify_seed_opt, verify_seed);
      const VerifyReport report = run_verify(vcfg);
      print_report(report, out);
      return report.passed() ? kExitOk : kExitVerifyFailed;
    }
    if (*project) {
      const SimplexSpec spec{vec.size(), shift};
      out << join(project_onto_simplex(vec, spec).coords()) << '\n';
      return kExitOk;
    }
    if (*solve) {
      std::ifstream in(instance_path);
      if (!in) throw std::invalid_argument("cannot open instance file '" + instance_path + "'");
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("instance JSON parse error: ") + e.what());
      }
      const Instance inst = instance_from_json(j);
      if (fw_weights.size() != dim_of(inst)) {
        throw std::invalid_argument("weights have dimension " +
                                    std::to_string(fw_weights.size()) +
                                    ", instance has " + std::to_string(dim_of(inst)));
      }
      out << join(forward_argmax(inst, fw_weights).y) << '\n';
      return kExitOk;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace invopt
