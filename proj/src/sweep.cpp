#include "offac/sweep.hpp"

#include "offac/mdp_io.hpp"
#include "offac/svg.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <thread>

namespace offac {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t run) {
  std::uint64_t z = base * 0x9E3779B97F4A7C15ULL + run + 1;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

struct RunContext {
  const ExperimentConfig* config;
  const Environment* env;
  Vec v_true;
  Mat target;
};

bool wants(const ExperimentConfig& c, const char* metric) {
  return std::find(c.metrics.begin(), c.metrics.end(), metric) != c.metrics.end();
}

std::vector<RunRecord> evaluation_run(const RunContext& ctx, const GridPoint& g, std::uint64_t run, std::uint64_t seed) {
  const ExperimentConfig& c = *ctx.config;
  const Environment& env = *ctx.env;
  std::vector<RunRecord> out;
  StreamGenerator gen(env, seed);
  CriticState<double> critic = CriticState<double>::zeros(env.features.num_features(), g.lambda);
  const StepSchedule alpha{g.alpha0, c.schedule.tau, c.schedule.kappa};
  const bool record_rms = wants(c, "rms");

  auto emit = [&](std::uint64_t step) {
    if (record_rms) out.push_back({run, seed, step, "rms", weighted_rms(env, critic.theta, ctx.v_true)});
  };
  const std::uint64_t horizon = env.episodic ? c.episodes : c.steps;
  if (horizon == 0) return out;
  emit(0);
  std::uint64_t t = 0;
  try {
    for (std::uint64_t unit = 1; unit <= horizon; ++unit) {
      bool episode_over = false;
      while (!episode_over) {
        const double a = alpha(t);
        CriticOptions<double> o{env.stream_gamma, g.lambda, a, a * c.schedule.alpha_u_ratio, g.normalize};
        const Transition<double> x = gen.next(ctx.target);
        switch (c.algorithm.critic) {
          case CriticKind::td: td_lambda_step(critic, x, o); break;
          case CriticKind::gtd: gtd_lambda_step(critic, x, o); break;
          case CriticKind::emphatic: emphatic_td_step(critic, x, o); break;
        }
        ++t;
        episode_over = !env.episodic || x.terminal;
      }
      if (unit % c.record_every == 0 || unit == horizon) emit(unit);
    }
  } catch (const Error&) {
    out.push_back({run, seed, t, "diverged", 1.0});
  }
  return out;
}

std::vector<RunRecord> control_run(const RunContext& ctx, const GridPoint& g, std::uint64_t run, std::uint64_t seed) {
  const ExperimentConfig& c = *ctx.config;
  const Environment& env = *ctx.env;
  const ActorKind kind = *c.algorithm.actor;
  const double lambda = kind == ActorKind::gradient_ac ? 1.0 : g.lambda;
  const TraceKind objective = kind == ActorKind::emphatic_ac ? TraceKind::emphatic : TraceKind::gtd;
  std::vector<RunRecord> out;
  StreamGenerator gen(env, seed);
  ActorState<double> actor = ActorState<double>::start(env.initial_w, lambda);
  CriticState<double> critic = CriticState<double>::zeros(env.features.num_features(), lambda);
  const StepSchedule alpha{g.alpha0, c.schedule.tau, c.schedule.kappa};
  const StepSchedule beta{c.schedule.beta0, c.schedule.beta_tau, c.schedule.beta_kappa};

  auto emit = [&](std::uint64_t step) {
    if (wants(c, "J"))
      out.push_back({run, seed, step, "J",
                     exact_objective(env.mdp, env.features, env.policy, actor.w, env.weights, lambda, objective)});
    if (wants(c, "pi")) out.push_back({run, seed, step, "pi", env.policy.probability(actor.w, 0, 0)});
    if (wants(c, "rms")) {
      const Vec v = exact_value_function(env.mdp, env.policy.table(actor.w));
      out.push_back({run, seed, step, "rms", weighted_rms(env, critic.theta, v)});
    }
  };
  const std::uint64_t horizon = env.episodic ? c.episodes : c.steps;
  if (horizon == 0) return out;
  emit(0);
  std::uint64_t t = 0;
  try {
    for (std::uint64_t unit = 1; unit <= horizon; ++unit) {
      bool episode_over = false;
      while (!episode_over) {
        ActorOptions<double> o;
        o.gamma = env.stream_gamma;
        o.lambda = lambda;
        o.alpha = alpha(t);
        o.alpha_u = o.alpha * c.schedule.alpha_u_ratio;
        o.beta = beta(t);
        o.normalize = g.normalize;
        const Transition<double> x = gen.next();
        switch (kind) {
          case ActorKind::gradient_ac: gradient_ac_step(actor, critic, env.policy, env.behavior, x, o); break;
          case ActorKind::emphatic_ac: emphatic_ac_step(actor, critic, env.policy, env.behavior, x, o); break;
          case ActorKind::offpac: offpac_actor_step(actor, critic, env.policy, env.behavior, x, o); break;
          case ActorKind::onpolicy: throw ConfigError("on-policy actor is not available in sweeps");
        }
        ++t;
        episode_over = !env.episodic || x.terminal;
      }
      if (unit % c.record_every == 0 || unit == horizon) emit(unit);
    }
  } catch (const DivergenceError&) {
    out.push_back({run, seed, t, "diverged", 1.0});
  } catch (const InvariantError&) {
    out.push_back({run, seed, t, "diverged", 1.0});
  }
  return out;
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  const Environment env = build_environment(config.environment);
  if (env.episodic && config.steps > 0 && config.episodes == 0)
    throw ConfigError("episodic environment: give the horizon in episodes");
  if (!env.episodic && config.episodes > 0) throw ConfigError("continuing environment: give the horizon in steps");

  SweepResult result;
  result.runs_per_point = config.runs;
  for (double l : config.algorithm.lambdas)
    for (double a : config.schedule.alpha0)
      for (bool n : config.algorithm.normalize) result.grid.push_back({result.grid.size(), l, a, n});

  RunContext ctx{&config, &env, Vec(), env.target_table()};
  ctx.v_true = exact_value_function(env.mdp, ctx.target);

  const std::size_t total = result.grid.size() * static_cast<std::size_t>(config.runs);
  std::vector<std::vector<RunRecord>> per_run(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t id = next++; id < total; id = next++) {
      const GridPoint& g = result.grid[id / static_cast<std::size_t>(config.runs)];
      const std::uint64_t r = id % static_cast<std::size_t>(config.runs);
      const std::uint64_t seed = derive_seed(config.seed, r);
      per_run[id] = config.algorithm.actor ? control_run(ctx, g, id, seed) : evaluation_run(ctx, g, id, seed);
    }
  };
  const int n_threads = std::max(1, std::min<int>(config.threads, static_cast<int>(std::max<std::size_t>(total, 1))));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& rows : per_run)
    for (auto& r : rows) result.records.push_back(std::move(r));
  result.summary = summarize(result.records, static_cast<std::size_t>(std::max(config.runs, 1)));
  return result;
}

std::vector<BestAlpha> best_over_alpha(const SweepResult& result, const std::string& metric) {
  // final step per grid point
  std::map<std::size_t, const SummaryRow*> last;
  for (const auto& row : result.summary) {
    if (row.metric != metric) continue;
    auto& slot = last[row.grid];
    if (!slot || row.step > slot->step) slot = &row;
  }
  std::map<std::pair<double, bool>, BestAlpha> best;
  for (const auto& [grid, row] : last) {
    const GridPoint& g = result.grid[grid];
    // points that lost runs to divergence do not compete
    if (row->n < static_cast<std::size_t>(result.runs_per_point)) continue;
    auto key = std::make_pair(g.lambda, g.normalize);
    auto it = best.find(key);
    if (it == best.end() || row->mean < it->second.mean) best[key] = {g.lambda, g.normalize, g.alpha0, row->mean, row->se};
  }
  std::vector<BestAlpha> out;
  for (const auto& [key, b] : best) out.push_back(b);
  return out;
}

void write_sweep_outputs(const ExperimentConfig& config, const SweepResult& result) {
  namespace fs = std::filesystem;
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("records.csv");
    write_records_csv(f, result.records);
  }
  {
    auto f = open("grid.csv");
    write_grid_csv(f, result.grid);
  }
  {
    auto f = open("summary.csv");
    write_summary_csv(f, result.summary, result.grid);
  }
  const std::string primary = config.metrics.empty() ? "rms" : config.metrics.front();
  const auto best = best_over_alpha(result, primary);
  {
    auto f = open("best_alpha.csv");
    f << "lambda,normalize,alpha0,metric,mean,se\n";
    for (const auto& b : best)
      f << format_double(b.lambda) << ',' << (b.normalize ? 1 : 0) << ',' << format_double(b.alpha0) << ',' << primary
        << ',' << format_double(b.mean) << ',' << format_double(b.se) << '\n';
  }
  if (!config.plots) return;

  // final value against alpha0, one curve per lambda, one chart per normalize setting
  std::map<std::size_t, const SummaryRow*> last;
  for (const auto& row : result.summary)
    if (row.metric == primary && (!last[row.grid] || row.step > last[row.grid]->step)) last[row.grid] = &row;
  for (bool norm : {false, true}) {
    std::map<double, Series> curves;
    for (const auto& [grid, row] : last) {
      const GridPoint& g = result.grid[grid];
      if (g.normalize != norm) continue;
      Series& s = curves[g.lambda];
      s.label = "lambda=" + format_double(g.lambda);
      s.x.push_back(g.alpha0);
      s.y.push_back(row->mean);
    }
    if (curves.empty()) continue;
    std::vector<Series> series;
    for (auto& [l, s] : curves) series.push_back(std::move(s));
    ChartOptions opts{config.name + (norm ? " (normalized trace)" : ""), "alpha0", primary + " at end", true};
    write_line_chart((dir / (std::string(primary) + (norm ? "_vs_alpha_normalized.svg" : "_vs_alpha.svg"))).string(),
                     series, opts);
  }
  // learning curves for every metric, one curve per grid point
  std::map<std::string, std::map<std::size_t, Series>> curves;
  for (const auto& row : result.summary) {
    if (row.metric == "diverged") continue;
    Series& s = curves[row.metric][row.grid];
    const GridPoint& g = result.grid[row.grid];
    s.label = "l=" + format_double(g.lambda) + " a=" + format_double(g.alpha0) + (g.normalize ? " norm" : "");
    s.x.push_back(static_cast<double>(row.step));
    s.y.push_back(row.mean);
  }
  for (auto& [metric, by_grid] : curves) {
    if (by_grid.size() > 10) continue;  // unreadable; the CSV has everything
    std::vector<Series> series;
    for (auto& [g, s] : by_grid) series.push_back(std::move(s));
    ChartOptions opts{config.name + ": " + metric, "step", metric, false};
    write_line_chart((dir / (metric + "_curve.svg")).string(), series, opts);
  }
}

}  // namespace offac
