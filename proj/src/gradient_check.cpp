#include "offac/gradient_check.hpp"

#include "offac/actors.hpp"
#include "offac/mdp_io.hpp"

#include <ostream>

namespace offac {

namespace {

TraceKind objective_kind(ActorKind a) { return a == ActorKind::emphatic_ac ? TraceKind::emphatic : TraceKind::gtd; }

double relative_error(const Vec& estimate, const Vec& reference, double significant) {
  double worst = 0.0;
  for (Index k = 0; k < reference.size(); ++k) {
    if (std::abs(reference(k)) <= significant) continue;
    worst = std::max(worst, std::abs(estimate(k) - reference(k)) / std::abs(reference(k)));
  }
  return worst;
}

}  // namespace

GradientCheckRow check_gradient(const Environment& env, const Vec& w, ActorKind algorithm, double lambda,
                                std::uint64_t steps, double eps, std::uint64_t stream_seed, double tolerance,
                                double significant) {
  if (algorithm == ActorKind::gradient_ac) lambda = 1.0;
  const TraceKind kind = objective_kind(algorithm);
  const Mat target = env.policy.table(w);

  GradientCheckRow row;
  row.instance = env.name;
  row.algorithm = algorithm;
  row.lambda = lambda;

  const auto fixed = td_fixed_point(env.mdp, env.features, target, env.weights, lambda, kind);
  row.fd = finite_difference_grad_J(env.mdp, env.features, env.policy, env.weights, w, lambda, kind, eps);
  if (algorithm == ActorKind::gradient_ac || algorithm == ActorKind::emphatic_ac)
    row.exact = expected_score_trace_update(env.mdp, env.features, env.policy, w, env.weights, lambda, fixed.theta);
  else
    row.exact = expected_score_update(env.mdp, env.features, env.policy, w, env.weights, fixed.theta);

  const Index k = w.size();
  ActorState<double> actor = ActorState<double>::start(w, lambda);
  CriticState<double> critic = CriticState<double>::zeros(env.features.num_features(), lambda);
  critic.theta = fixed.theta;
  ActorOptions<double> opts;
  opts.gamma = env.stream_gamma;
  opts.lambda = lambda;

  StreamGenerator gen(env, stream_seed);
  constexpr std::uint64_t batches = 100;
  const std::uint64_t per_batch = std::max<std::uint64_t>(1, steps / batches);
  Mat batch_means = Mat::Zero(k, batches);
  Vec acc = Vec::Zero(k);
  std::uint64_t used = 0;
  for (std::uint64_t b = 0; b < batches && steps > 0; ++b) {
    Vec sum = Vec::Zero(k);
    for (std::uint64_t i = 0; i < per_batch; ++i) {
      const Transition<double> x = gen.next();
      switch (algorithm) {
        case ActorKind::gradient_ac: gradient_ac_step(actor, critic, env.policy, env.behavior, x, opts); break;
        case ActorKind::emphatic_ac: emphatic_ac_step(actor, critic, env.policy, env.behavior, x, opts); break;
        case ActorKind::offpac: offpac_actor_step(actor, critic, env.policy, env.behavior, x, opts); break;
        case ActorKind::onpolicy: onpolicy_ac_step(actor, critic, env.policy, x, opts); break;
      }
      sum += actor.last_update;
    }
    batch_means.col(static_cast<Index>(b)) = sum / static_cast<double>(per_batch);
    acc += sum;
    used += per_batch;
  }
  row.mc = used ? Vec(acc / static_cast<double>(used)) : Vec::Zero(k);
  if (used) {
    const Vec mean = batch_means.rowwise().mean();
    const Vec var = (batch_means.colwise() - mean).array().square().rowwise().sum() / double(batches - 1);
    row.se = (var / double(batches)).cwiseSqrt();
  } else {
    row.se = Vec::Zero(k);
  }
  row.max_rel_error = relative_error(row.mc, row.fd, significant);
  row.max_rel_error_exact = relative_error(row.exact, row.fd, significant);
  row.pass = row.max_rel_error <= tolerance;
  return row;
}

std::vector<GradientCheckRow> run_gradient_check(const GradientCheckOptions& o) {
  std::vector<std::pair<ActorKind, double>> algorithms;
  if (o.gradient_ac) algorithms.emplace_back(ActorKind::gradient_ac, 1.0);
  for (double l : o.emphatic_lambdas) algorithms.emplace_back(ActorKind::emphatic_ac, l);

  std::vector<GradientCheckRow> rows;
  auto run_env = [&](const Environment& env, std::uint64_t seed) {
    for (const auto& [alg, lambda] : algorithms) {
      GradientCheckRow row = check_gradient(env, env.initial_w, alg, lambda, o.steps, o.eps, o.stream_seed + seed,
                                            o.tolerance, o.significant);
      row.seed = seed;
      rows.push_back(std::move(row));
    }
  };

  for (std::uint64_t seed : o.seeds) {
    const Environment env = make_random_mdp(seed, o.states, o.actions, o.features, o.gamma);
    const auto a0 = td_fixed_point(env.mdp, env.features, env.target_table(), env.weights, 0.0, TraceKind::gtd);
    if (a0.condition > o.max_condition) {
      GradientCheckRow row;
      row.instance = env.name;
      row.seed = seed;
      row.skipped = true;
      row.reason = "cond(A(0)) = " + format_double(a0.condition) + " above " + format_double(o.max_condition);
      rows.push_back(std::move(row));
      continue;
    }
    run_env(env, seed);
  }
  if (o.counterexample) run_env(make_counterexample(), 0);
  return rows;
}

void write_gradient_check_csv(std::ostream& out, const std::vector<GradientCheckRow>& rows) {
  out << "instance,seed,algorithm,lambda,component,fd,mc,se,exact,max_rel_error,pass,skipped,reason\n";
  for (const auto& r : rows) {
    if (r.skipped) {
      out << r.instance << ',' << r.seed << ",,,,,,,,,0,1," << r.reason << '\n';
      continue;
    }
    for (Index k = 0; k < r.fd.size(); ++k)
      out << r.instance << ',' << r.seed << ',' << to_string(r.algorithm) << ',' << format_double(r.lambda) << ','
          << k << ',' << format_double(r.fd(k)) << ',' << format_double(r.mc(k)) << ',' << format_double(r.se(k))
          << ',' << format_double(r.exact(k)) << ',' << format_double(r.max_rel_error) << ',' << (r.pass ? 1 : 0)
          << ",0,\n";
  }
}

}  // namespace offac
