#ifndef OFFAC_ENVS_HPP
#define OFFAC_ENVS_HPP

#include "offac/critics.hpp"
#include "offac/mdp.hpp"
#include "offac/oracle.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace offac {

/// An MDP together with everything needed to learn on it.
struct Environment {
  std::string name;
  FiniteMdp<double> mdp;
  LinearFeatureMap<double> features;
  FixedPolicy<double> behavior;
  ParametricPolicy<double> policy;
  Vec initial_w;                 ///< starting / reference target parameters
  double stream_gamma = 0.0;     ///< discount used by the learners
  bool episodic = false;
  std::vector<char> terminal;    ///< per state, episodic only
  Index start_state = 0;
  ProjectionWeights<double> weights;  ///< d used for oracles and RMS

  Mat target_table() const { return policy.table(initial_w); }
};

/// Two states, two actions. Action 0 moves to state 1 and pays 1 on arrival,
/// action 1 moves to state 0 and pays 0. phi(0) = (1), phi(1) = (2).
/// behavior_p1 is the behavior probability of action 0.
Environment make_counterexample(double gamma = 0.99, double behavior_p1 = 1.0 / 3.0);

/// 19-state random walk: states 1..19 plus absorbing terminals 0 and 20, start
/// at 10, -1 for exiting left and +1 for exiting right, uniform left/right,
/// tabular features (zero rows at the terminals). d is the visitation
/// distribution of the restart chain restricted to the non-terminal states.
Environment make_random_walk_19();

/// Seeded random instance with an intercept feature and a tabular softmax
/// target near the behavior policy. Rewards depend on (s, a) only.
Environment make_random_mdp(std::uint64_t seed, Index n_states = 5, Index n_actions = 3,
                            Index n_features = 3, double gamma = 0.9);

/// Samples behavior transitions from an Environment.
class StreamGenerator {
 public:
  StreamGenerator(const Environment& env, std::uint64_t seed);

  /// Transition with rho = 1; the caller (or an actor) sets rho.
  Transition<double> next();
  /// Transition with rho for the target pi_w.
  Transition<double> next(const ParametricPolicy<double>& target, const Vec& w);
  /// Transition with rho for a fixed target table.
  Transition<double> next(const Mat& target_table);

  Index state() const { return state_; }
  std::mt19937_64& rng() { return rng_; }

 private:
  const Environment* env_;
  std::mt19937_64 rng_;
  Index state_;
};

Transition<double> next_transition(StreamGenerator& gen, const ParametricPolicy<double>& target, const Vec& w);

/// Index of a draw from a discrete distribution given by a row vector.
template <class Row>
Index sample_index(const Row& probs, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(rng);
  const Index n = probs.size();
  for (Index i = 0; i < n; ++i) {
    u -= probs(i);
    if (u < 0.0) return i;
  }
  for (Index i = n - 1; i > 0; --i)
    if (probs(i) > 0.0) return i;
  return 0;
}

/// sqrt(sum_s d(s) (phi(s)^T theta - v(s))^2) over the environment's weights.
double weighted_rms(const Environment& env, const Vec& theta, const Vec& v_true);
/// Same with equal weight on every non-terminal state.
double uniform_rms(const Environment& env, const Vec& theta, const Vec& v_true);

/// V^pi of the environment's reference target (terminal rows included).
Vec true_values(const Environment& env);

}  // namespace offac

#endif  // OFFAC_ENVS_HPP
