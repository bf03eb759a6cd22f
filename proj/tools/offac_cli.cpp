#include "offac/config.hpp"
#include "offac/counterexample.hpp"
#include "offac/gradient_check.hpp"
#include "offac/mdp_io.hpp"
#include "offac/report_io.hpp"
#include "offac/sweep.hpp"
#include "offac/svg.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace offac;

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir, long long seed, int jobs) {
  ExperimentConfig config = load_config(config_path);
  if (!out_dir.empty()) config.output_dir = out_dir;
  if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
  if (jobs > 0) config.threads = jobs;
  const SweepResult result = run_sweep(config);
  write_sweep_outputs(config, result);
  std::size_t diverged = 0;
  for (const auto& r : result.records) diverged += r.metric == "diverged";
  std::cout << "sweep '" << config.name << "': " << result.grid.size() << " grid points x " << config.runs
            << " runs, " << result.records.size() << " records, " << diverged << " diverged runs -> "
            << config.output_dir << '\n';
  for (const auto& b : best_over_alpha(result, config.metrics.front()))
    std::cout << "  lambda " << b.lambda << (b.normalize ? " normalized" : "") << ": best alpha0 " << b.alpha0 << ", "
              << config.metrics.front() << " " << b.mean << " +- " << b.se << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Off-policy actor-critic toolkit: critics, actors, oracles and experiments"};
  app.require_subcommand(1);

  auto* sweep = app.add_subcommand("sweep", "run a grid sweep from a JSON config");
  std::string config_path, out_dir;
  long long seed = -1;
  int jobs = 0;
  sweep->add_option("-c,--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("-o,--out", out_dir, "output directory (overrides the config)");
  sweep->add_option("-s,--seed", seed, "base seed override");
  sweep->add_option("-j,--jobs", jobs, "worker threads (overrides the config)");

  auto* ce = app.add_subcommand("counterexample", "two-state Off-PAC vs Gradient-AC comparison");
  CounterexampleOptions ce_opts;
  std::string ce_out = "out/counterexample";
  ce->add_option("--gamma", ce_opts.gamma, "discount")->capture_default_str();
  ce->add_option("--p1", ce_opts.behavior_p1, "behavior probability of action 0")->capture_default_str();
  ce->add_option("--steps", ce_opts.steps, "steps per run")->capture_default_str();
  ce->add_option("--runs", ce_opts.runs, "runs")->capture_default_str();
  ce->add_option("--w0", ce_opts.initial_w, "initial target preferences w(s0,a0) w(s0,a1) w(s1,a0) w(s1,a1)")
      ->expected(4)
      ->capture_default_str();
  ce->add_option("--seed", ce_opts.seed, "base seed")->capture_default_str();
  ce->add_flag("--live", ce_opts.live, "also run learning critics/actors and record pi(a0|s0)");
  ce->add_option("-o,--out", ce_out, "output directory")->capture_default_str();

  auto* gc = app.add_subcommand("gradcheck", "averaged actor update vs finite-difference gradient");
  GradientCheckOptions gc_opts;
  std::string gc_out = "out/gradcheck";
  gc->add_option("--seeds", gc_opts.seeds, "random MDP seeds")->capture_default_str();
  gc->add_option("--lambdas", gc_opts.emphatic_lambdas, "Emphatic-AC lambdas")->capture_default_str();
  gc->add_option("--steps", gc_opts.steps, "steps per check")->capture_default_str();
  gc->add_option("--eps", gc_opts.eps, "finite-difference step")->capture_default_str();
  gc->add_option("--gamma", gc_opts.gamma, "discount of the random MDPs")->capture_default_str();
  gc->add_option("--tolerance", gc_opts.tolerance, "relative error bound")->capture_default_str();
  gc->add_option("--max-condition", gc_opts.max_condition, "skip instances with cond(A(0)) above this")
      ->capture_default_str();
  bool no_counterexample = false;
  gc->add_flag("--no-counterexample", no_counterexample, "skip the two-state instance");
  gc->add_option("-o,--out", gc_out, "output directory")->capture_default_str();

  auto* oracle = app.add_subcommand("oracle", "dump fixed points of an MDP file (or write a built-in MDP)");
  std::string mdp_path, write_env, report_path;
  std::vector<double> lambdas{0.0, 0.5, 1.0};
  std::vector<std::string> kinds{"gtd", "emphatic"};
  oracle->add_option("-m,--mdp", mdp_path, "MDP file to analyse");
  oracle->add_option("--lambdas", lambdas, "lambda values")->capture_default_str();
  oracle->add_option("--kinds", kinds, "gtd and/or emphatic")->capture_default_str();
  oracle->add_option("-o,--out", report_path, "write fixed-point records here instead of stdout");
  std::string env_name = "counterexample";
  std::uint64_t env_seed = 1;
  oracle->add_option("--write-env", write_env, "write the built-in environment --env to this MDP file and exit");
  oracle->add_option("--env", env_name, "counterexample | random_walk_19 | random_mdp")->capture_default_str();
  oracle->add_option("--env-seed", env_seed, "seed for random_mdp")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sweep) return cmd_sweep(config_path, out_dir, seed, jobs);

    if (*ce) {
      const auto rep = run_counterexample_comparison(ce_opts);
      auto f = open_out(std::filesystem::path(ce_out) / "report.txt");
      write_counterexample_report(f, rep);
      write_counterexample_report(std::cout, rep);
      if (!rep.traces.empty()) {
        auto csv = open_out(std::filesystem::path(ce_out) / "pi_trace.csv");
        csv << "algorithm,step,mean_pi,se\n";
        std::vector<Series> series;
        for (const auto& t : rep.traces) {
          Series s{to_string(t.algorithm), {}, {}};
          for (std::size_t i = 0; i < t.steps.size(); ++i) {
            csv << to_string(t.algorithm) << ',' << t.steps[i] << ',' << format_double(t.mean_pi[i]) << ','
                << format_double(t.se_pi[i]) << '\n';
            s.x.push_back(static_cast<double>(t.steps[i]));
            s.y.push_back(t.mean_pi[i]);
          }
          series.push_back(std::move(s));
        }
        write_line_chart((std::filesystem::path(ce_out) / "pi_trace.svg").string(), series,
                         {"counterexample: pi(a0|s0)", "step", "mean pi(a0|s0)", false});
      }
      bool ok = true;
      for (const auto& t : rep.sign_tests) ok = ok && t.confident;
      return ok ? 0 : 1;
    }

    if (*gc) {
      gc_opts.counterexample = !no_counterexample;
      const auto rows = run_gradient_check(gc_opts);
      auto f = open_out(std::filesystem::path(gc_out) / "gradcheck.csv");
      write_gradient_check_csv(f, rows);
      bool ok = true;
      for (const auto& r : rows) {
        if (r.skipped) {
          std::cout << r.instance << " seed " << r.seed << ": skipped (" << r.reason << ")\n";
          continue;
        }
        std::cout << r.instance << " seed " << r.seed << " " << to_string(r.algorithm) << " lambda " << r.lambda
                  << ": max rel error " << r.max_rel_error << " (closed form " << r.max_rel_error_exact << ") "
                  << (r.pass ? "PASS" : "FAIL") << '\n';
        ok = ok && r.pass;
      }
      return ok ? 0 : 1;
    }

    if (*oracle) {
      if (!write_env.empty()) {
        EnvironmentSpec spec;
        spec.name = env_name;
        spec.seed = env_seed;
        save_mdp(write_env, document_of(build_environment(spec)));
        std::cout << "wrote " << write_env << '\n';
        return 0;
      }
      if (mdp_path.empty()) throw ConfigError("oracle: give --mdp FILE or --write-env FILE");
      const MdpDocument doc = load_mdp(mdp_path);
      if (!doc.features) throw ConfigError("MDP file has no features section");
      const LinearFeatureMap<double> features(*doc.features);
      const Mat target = doc.target ? *doc.target : doc.behavior.table();
      const auto d = behavior_weights(doc.mdp, doc.behavior);
      std::ofstream file;
      std::ostream* out = &std::cout;
      if (!report_path.empty()) {
        file = open_out(report_path);
        out = &file;
      }
      for (const auto& k : kinds)
        for (double l : lambdas) write_fixed_point(*out, td_fixed_point(doc.mdp, features, target, d, l, trace_kind_from_string(k)));
      return 0;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  }
  return 0;
}
