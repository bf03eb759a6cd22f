#include "offac/counterexample.hpp"

#include "offac/mdp_io.hpp"

#include <cmath>
#include <ostream>

namespace offac {

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe out;
  if (xs.empty()) return out;
  for (double x : xs) out.mean += x;
  out.mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return out;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  return out;
}

std::uint64_t run_seed(std::uint64_t base, int run) {
  // splitmix64 of (base, run) so neighbouring runs get unrelated streams
  std::uint64_t z = base * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(run) + 1;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Vec initial_vector(const std::vector<double>& w) {
  if (w.size() != 4) throw ConfigError("counterexample: initial w must have 4 entries");
  return Eigen::Map<const Vec>(w.data(), 4);
}

double along_u(const Vec& v) { return v(0) - v(1); }

}  // namespace

CounterexampleReport run_counterexample_comparison(const CounterexampleOptions& o) {
  const Environment env = make_counterexample(o.gamma, o.behavior_p1);
  CounterexampleReport rep;
  rep.gamma = o.gamma;
  rep.behavior_p1 = o.behavior_p1;
  rep.d = env.weights.vector();

  Mat always_a0(2, 2);
  always_a0 << 1.0, 0.0, 1.0, 0.0;
  rep.theta_gtd0_deterministic = td_fixed_point(env.mdp, env.features, always_a0, env.weights, 0.0, TraceKind::gtd).theta(0);
  rep.theta_gtd1_deterministic = td_fixed_point(env.mdp, env.features, always_a0, env.weights, 1.0, TraceKind::gtd).theta(0);
  rep.theta_mse_deterministic = mse_solution(env.mdp, env.features, always_a0, env.weights)(0);
  rep.theta_closed_form = 2.0 / (3.0 - 4.0 * o.gamma);

  rep.w0 = initial_vector(o.initial_w);
  const Mat target = env.policy.table(rep.w0);
  rep.pi_a0 = target(0, 0);
  if (o.steps == 0) return rep;

  for (ActorKind alg : {ActorKind::offpac, ActorKind::gradient_ac}) {
    const double lambda = alg == ActorKind::offpac ? 0.0 : 1.0;
    const auto fixed = td_fixed_point(env.mdp, env.features, target, env.weights, lambda, TraceKind::gtd);
    SignTest test;
    test.algorithm = alg;
    test.theta = fixed.theta(0);
    test.expected_positive = alg == ActorKind::gradient_ac;
    test.exact = along_u(alg == ActorKind::offpac
                             ? expected_score_update(env.mdp, env.features, env.policy, rep.w0, env.weights, fixed.theta)
                             : expected_score_trace_update(env.mdp, env.features, env.policy, rep.w0, env.weights, 1.0,
                                                           fixed.theta));
    std::vector<double> per_run;
    for (int r = 0; r < o.runs; ++r) {
      StreamGenerator gen(env, run_seed(o.seed, r));
      ActorState<double> actor = ActorState<double>::start(rep.w0, lambda);
      CriticState<double> critic = CriticState<double>::zeros(1, lambda);
      critic.theta = fixed.theta;
      ActorOptions<double> opts;
      opts.gamma = o.gamma;
      opts.lambda = lambda;
      double sum = 0.0;
      for (std::uint64_t t = 0; t < o.steps; ++t) {
        const Transition<double> x = gen.next();
        if (alg == ActorKind::offpac)
          offpac_actor_step(actor, critic, env.policy, env.behavior, x, opts);
        else
          gradient_ac_step(actor, critic, env.policy, env.behavior, x, opts);
        sum += along_u(actor.last_update);
      }
      per_run.push_back(sum / static_cast<double>(o.steps));
    }
    const MeanSe ms = mean_se(per_run);
    test.mean = ms.mean;
    test.se = ms.se;
    test.confident = test.expected_positive ? ms.mean - o.z * ms.se > 0.0 : ms.mean + o.z * ms.se < 0.0;
    rep.sign_tests.push_back(test);
  }

  if (o.live) {
    o.schedule.validate();
    for (ActorKind alg : {ActorKind::offpac, ActorKind::gradient_ac}) {
      const double lambda = alg == ActorKind::offpac ? 0.0 : 1.0;
      ProbabilityTrace trace;
      trace.algorithm = alg;
      std::vector<std::vector<double>> samples;
      for (int r = 0; r < o.runs; ++r) {
        StreamGenerator gen(env, run_seed(o.seed + 1000, r));
        ActorState<double> actor = ActorState<double>::start(rep.w0, lambda);
        CriticState<double> critic = CriticState<double>::zeros(1, lambda);
        std::size_t slot = 0;
        for (std::uint64_t t = 0; t <= o.steps; ++t) {
          if (t % o.record_every == 0 || t == o.steps) {
            if (r == 0) trace.steps.push_back(t);
            if (samples.size() <= slot) samples.emplace_back();
            samples[slot++].push_back(env.policy.probability(actor.w, 0, 0));
          }
          if (t == o.steps) break;
          ActorOptions<double> opts;
          opts.gamma = o.gamma;
          opts.lambda = lambda;
          opts.alpha = o.schedule.critic(t);
          opts.alpha_u = opts.alpha;
          opts.beta = o.schedule.actor(t);
          const Transition<double> x = gen.next();
          if (alg == ActorKind::offpac)
            offpac_actor_step(actor, critic, env.policy, env.behavior, x, opts);
          else
            gradient_ac_step(actor, critic, env.policy, env.behavior, x, opts);
        }
      }
      for (const auto& s : samples) {
        const MeanSe ms = mean_se(s);
        trace.mean_pi.push_back(ms.mean);
        trace.se_pi.push_back(ms.se);
      }
      rep.traces.push_back(std::move(trace));
    }
  }
  return rep;
}

void write_counterexample_report(std::ostream& out, const CounterexampleReport& r) {
  out << "gamma " << format_double(r.gamma) << '\n';
  out << "behavior_p1 " << format_double(r.behavior_p1) << '\n';
  out << "d " << format_double(r.d(0)) << ' ' << format_double(r.d(1)) << '\n';
  out << "theta_gtd0_always_a0 " << format_double(r.theta_gtd0_deterministic) << '\n';
  out << "theta_closed_form_2/(3-4gamma) " << format_double(r.theta_closed_form) << '\n';
  out << "theta_gtd1_always_a0 " << format_double(r.theta_gtd1_deterministic) << '\n';
  out << "theta_mse_always_a0 " << format_double(r.theta_mse_deterministic) << '\n';
  out << "w0 " << format_double(r.w0(0)) << ' ' << format_double(r.w0(1)) << ' ' << format_double(r.w0(2)) << ' '
      << format_double(r.w0(3)) << '\n';
  out << "pi_w0(a0|s0) " << format_double(r.pi_a0) << '\n';
  for (const auto& t : r.sign_tests)
    out << "sign " << to_string(t.algorithm) << " theta " << format_double(t.theta) << " exact " << format_double(t.exact)
        << " mean " << format_double(t.mean) << " se " << format_double(t.se) << " expected "
        << (t.expected_positive ? "positive" : "negative") << " confident " << (t.confident ? "yes" : "no") << '\n';
}

AscentReport run_j_ascent(const AscentOptions& o) {
  o.schedule.validate();
  const Environment env = make_counterexample(o.gamma, o.behavior_p1);
  const Vec w0 = initial_vector(o.initial_w);

  AscentReport rep;
  std::vector<std::vector<double>> samples;
  for (int r = 0; r < o.runs; ++r) {
    StreamGenerator gen(env, run_seed(o.seed, r));
    ActorState<double> actor = ActorState<double>::start(w0, 1.0);
    CriticState<double> critic = CriticState<double>::zeros(1, 1.0);
    std::size_t slot = 0;
    bool diverged = false;
    for (std::uint64_t t = 0; t <= o.steps; ++t) {
      if (t % o.record_every == 0 || t == o.steps) {
        if (r == 0) rep.steps.push_back(t);
        if (samples.size() <= slot) samples.emplace_back();
        samples[slot++].push_back(
            exact_objective(env.mdp, env.features, env.policy, actor.w, env.weights, 1.0, TraceKind::gtd));
      }
      if (t == o.steps) break;
      if (diverged) continue;  // w stays where it was when the critic blew up
      ActorOptions<double> opts;
      opts.gamma = o.gamma;
      opts.alpha = o.schedule.critic(t);
      opts.alpha_u = opts.alpha;
      opts.beta = o.schedule.actor(t);
      try {
        gradient_ac_step(actor, critic, env.policy, env.behavior, gen.next(), opts);
      } catch (const DivergenceError&) {
        diverged = true;
      }
    }
    if (diverged) ++rep.diverged;
  }
  for (const auto& s : samples) {
    const MeanSe ms = mean_se(s);
    rep.mean_j.push_back(ms.mean);
    rep.se_j.push_back(ms.se);
  }
  return rep;
}

}  // namespace offac
