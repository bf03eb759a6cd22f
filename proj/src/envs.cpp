#include "offac/envs.hpp"

#include <cmath>

namespace offac {

namespace {

ProjectionWeights<double> stationary_weights(const FiniteMdp<double>& mdp, const FixedPolicy<double>& behavior) {
  return behavior_weights(mdp, behavior);
}

}  // namespace

Environment make_counterexample(double gamma, double behavior_p1) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ModelError("counterexample: gamma must lie in [0, 1)");
  if (!(behavior_p1 > 0.0 && behavior_p1 < 1.0))
    throw ModelError("counterexample: behavior_p1 must lie in (0, 1)");

  Mat to_second = Mat::Zero(2, 2);
  to_second.col(1).setOnes();
  Mat to_first = Mat::Zero(2, 2);
  to_first.col(0).setOnes();
  Mat pay_second = Mat::Zero(2, 2);
  pay_second.col(1).setOnes();

  FiniteMdp<double> mdp({to_second, to_first}, {pay_second, Mat::Zero(2, 2)}, gamma);
  Mat phi(2, 1);
  phi << 1.0, 2.0;
  Mat b(2, 2);
  b << behavior_p1, 1.0 - behavior_p1, behavior_p1, 1.0 - behavior_p1;
  FixedPolicy<double> behavior(b);
  auto weights = stationary_weights(mdp, behavior);

  return Environment{"counterexample",
                     std::move(mdp),
                     LinearFeatureMap<double>(phi),
                     std::move(behavior),
                     ParametricPolicy<double>::tabular(2, 2),
                     Vec::Zero(4),
                     gamma,
                     false,
                     {},
                     0,
                     std::move(weights)};
}

Environment make_random_walk_19() {
  constexpr Index n = 21;
  constexpr Index start = 10;
  Mat left = Mat::Zero(n, n);
  Mat right = Mat::Zero(n, n);
  Mat r_left = Mat::Zero(n, n);
  Mat r_right = Mat::Zero(n, n);
  for (Index s = 1; s < n - 1; ++s) {
    left(s, s - 1) = 1.0;
    right(s, s + 1) = 1.0;
  }
  r_left(1, 0) = -1.0;
  r_right(n - 2, n - 1) = 1.0;
  for (Index s : {Index(0), n - 1}) {
    left(s, s) = 1.0;
    right(s, s) = 1.0;
  }
  FiniteMdp<double> mdp({left, right}, {r_left, r_right}, 1.0 - 1e-9);
  auto behavior = FixedPolicy<double>::uniform(n, 2);

  // visitation of the restart chain: terminals jump back to the start state
  Mat restart = policy_transition_matrix(mdp, behavior.table());
  for (Index s : {Index(0), n - 1}) {
    restart.row(s).setZero();
    restart(s, start) = 1.0;
  }
  ProjectionWeights<double> weights(stationary_distribution(restart));

  Mat phi = Mat::Zero(n, n - 2);
  for (Index s = 1; s < n - 1; ++s) phi(s, s - 1) = 1.0;

  std::vector<char> terminal(static_cast<std::size_t>(n), 0);
  terminal.front() = terminal.back() = 1;
  return Environment{"random_walk_19",
                     std::move(mdp),
                     LinearFeatureMap<double>(phi),
                     std::move(behavior),
                     ParametricPolicy<double>::tabular(n, 2),
                     Vec::Zero(2 * n),
                     1.0,
                     true,
                     std::move(terminal),
                     start,
                     std::move(weights)};
}

Environment make_random_mdp(std::uint64_t seed, Index n_states, Index n_actions, Index n_features, double gamma) {
  if (n_features < 2 || n_features > n_states)
    throw ModelError("make_random_mdp: need 2 <= n_features <= n_states");
  if (n_actions < 1) throw ModelError("make_random_mdp: need at least one action");
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> gamma1(1.0, 1.0);
  std::uniform_real_distribution<double> reward(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  auto dirichlet_row = [&](Index k) {
    Vec x(k);
    for (Index i = 0; i < k; ++i) x(i) = gamma1(rng);
    return Vec(x / x.sum());
  };

  std::vector<Mat> transitions;
  std::vector<Mat> rewards;
  for (Index a = 0; a < n_actions; ++a) {
    Mat p(n_states, n_states);
    Mat r(n_states, n_states);
    for (Index s = 0; s < n_states; ++s) {
      p.row(s) = (0.9 * dirichlet_row(n_states).array() + 0.1 / static_cast<double>(n_states)).matrix().transpose();
      p.row(s) /= p.row(s).sum();
      r.row(s).setConstant(reward(rng));
    }
    transitions.push_back(std::move(p));
    rewards.push_back(std::move(r));
  }

  Mat phi(n_states, n_features);
  bool full_rank = false;
  for (int attempt = 0; attempt < 10 && !full_rank; ++attempt) {
    for (Index s = 0; s < n_states; ++s)
      for (Index j = 0; j + 1 < n_features; ++j) phi(s, j) = normal(rng);
    phi.col(n_features - 1).setOnes();
    full_rank = Eigen::ColPivHouseholderQR<Mat>(phi).rank() == n_features;
  }
  if (!full_rank) throw RankError("make_random_mdp: no full-rank feature draw in 10 attempts");

  Mat b(n_states, n_actions);
  for (Index s = 0; s < n_states; ++s)
    b.row(s) = (0.5 * dirichlet_row(n_actions).array() + 0.5 / static_cast<double>(n_actions)).matrix().transpose();
  for (Index s = 0; s < n_states; ++s) b.row(s) /= b.row(s).sum();

  Vec w(n_states * n_actions);
  std::normal_distribution<double> jitter(0.0, 0.3);
  for (Index s = 0; s < n_states; ++s)
    for (Index a = 0; a < n_actions; ++a) w(s * n_actions + a) = std::log(b(s, a)) + jitter(rng);

  FiniteMdp<double> mdp(std::move(transitions), std::move(rewards), gamma);
  FixedPolicy<double> behavior(b);
  auto weights = stationary_weights(mdp, behavior);
  return Environment{"random_mdp",
                     std::move(mdp),
                     LinearFeatureMap<double>(phi),
                     std::move(behavior),
                     ParametricPolicy<double>::tabular(n_states, n_actions),
                     std::move(w),
                     gamma,
                     false,
                     {},
                     0,
                     std::move(weights)};
}

StreamGenerator::StreamGenerator(const Environment& env, std::uint64_t seed)
    : env_(&env), rng_(seed), state_(env.start_state) {}

Transition<double> StreamGenerator::next() {
  const Environment& env = *env_;
  Transition<double> x;
  x.state = state_;
  x.action = sample_index(env.behavior.table().row(state_), rng_);
  x.next_state = sample_index(env.mdp.transition(x.action).row(state_), rng_);
  x.reward = env.mdp.reward(x.state, x.action, x.next_state);
  x.phi = env.features.row(x.state);
  x.rho = 1.0;
  x.terminal = env.episodic && env.terminal[static_cast<std::size_t>(x.next_state)];
  if (x.terminal) {
    x.phi_next = Vec::Zero(env.features.num_features());
    state_ = env.start_state;
  } else {
    x.phi_next = env.features.row(x.next_state);
    state_ = x.next_state;
  }
  return x;
}

Transition<double> StreamGenerator::next(const ParametricPolicy<double>& target, const Vec& w) {
  Transition<double> x = next();
  x.rho = importance_ratio(target, w, env_->behavior, x.state, x.action);
  return x;
}

Transition<double> StreamGenerator::next(const Mat& target_table) {
  Transition<double> x = next();
  x.rho = importance_ratio(target_table(x.state, x.action), env_->behavior.probability(x.state, x.action));
  return x;
}

Transition<double> next_transition(StreamGenerator& gen, const ParametricPolicy<double>& target, const Vec& w) {
  return gen.next(target, w);
}

double weighted_rms(const Environment& env, const Vec& theta, const Vec& v_true) {
  const Vec err = env.features.matrix() * theta - v_true;
  const Vec& d = env.weights.vector();
  double total = 0.0;
  double mass = 0.0;
  for (Index s = 0; s < d.size(); ++s) {
    if (env.episodic && env.terminal[static_cast<std::size_t>(s)]) continue;
    total += d(s) * err(s) * err(s);
    mass += d(s);
  }
  return std::sqrt(total / mass);
}

double uniform_rms(const Environment& env, const Vec& theta, const Vec& v_true) {
  const Vec err = env.features.matrix() * theta - v_true;
  double total = 0.0;
  int count = 0;
  for (Index s = 0; s < err.size(); ++s) {
    if (env.episodic && env.terminal[static_cast<std::size_t>(s)]) continue;
    total += err(s) * err(s);
    ++count;
  }
  return std::sqrt(total / count);
}

Vec true_values(const Environment& env) { return exact_value_function(env.mdp, env.target_table()); }

}  // namespace offac
