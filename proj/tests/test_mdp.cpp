#include <doctest.h>

#include "offac/envs.hpp"
#include "offac/mdp.hpp"

using namespace offac;

namespace {

FiniteMdp<double> two_state(double gamma) {
  Mat p(2, 2);
  p << 0.5, 0.5, 0.2, 0.8;
  return FiniteMdp<double>({p}, {Mat::Zero(2, 2)}, gamma);
}

}  // namespace

TEST_CASE("FiniteMdp rejects malformed models") {
  Mat bad(2, 2);
  bad << 0.5, 0.6, 0.0, 1.0;
  CHECK_THROWS_AS(FiniteMdp<double>({bad}, {Mat::Zero(2, 2)}, 0.9), ModelError);
  CHECK_THROWS_AS(two_state(1.0), ModelError);
  CHECK_THROWS_AS(two_state(-0.1), ModelError);
  Mat neg(2, 2);
  neg << 1.5, -0.5, 0.0, 1.0;
  CHECK_THROWS_AS(FiniteMdp<double>({neg}, {Mat::Zero(2, 2)}, 0.9), ModelError);
  CHECK_NOTHROW(two_state(0.0));
}

TEST_CASE("feature rank and behavior coverage are enforced") {
  Mat phi(3, 2);
  phi << 1, 2, 2, 4, 3, 6;
  CHECK_THROWS_AS(LinearFeatureMap<double>{phi}, RankError);
  Mat ok(3, 2);
  ok << 0, 1, 1, 1, 2, 1;
  CHECK(LinearFeatureMap<double>(ok).has_intercept());

  Mat b(1, 2);
  b << 1.0, 0.0;
  CHECK_THROWS_AS(FixedPolicy<double>{b}, CoverageError);
  CHECK_THROWS_AS(importance_ratio(0.5, 1e-13), CoverageError);
  CHECK(importance_ratio(0.5, 0.25) == 2.0);
}

TEST_CASE("stationary distribution of the counterexample behavior chain") {
  const auto env = make_counterexample();
  const Vec d = stationary_distribution(policy_transition_matrix(env.mdp, env.behavior.table()));
  CHECK(d(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(d(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("periodic and reducible chains are rejected") {
  Mat flip(2, 2);
  flip << 0, 1, 1, 0;
  CHECK_THROWS_AS(stationary_distribution(flip), ChainError);
  Mat absorbing(2, 2);
  absorbing << 1, 0, 0.5, 0.5;
  CHECK_THROWS_AS(stationary_distribution(absorbing), ChainError);
}

TEST_CASE("large chains use power iteration and agree with balance") {
  const Index n = 1200;
  Mat p = Mat::Zero(n, n);
  for (Index s = 0; s < n; ++s) {
    p(s, (s + 1) % n) = 0.6;
    p(s, s) = 0.4;
  }
  const Vec d = stationary_distribution(p);
  CHECK(d.minCoeff() == doctest::Approx(1.0 / n));
  CHECK(d.maxCoeff() == doctest::Approx(1.0 / n));
}

TEST_CASE("softmax score matches finite differences of log pi") {
  Mat psi(3, 2);
  psi << 1, 0.5, -1, 1, 0.3, 1;
  const auto pol = ParametricPolicy<double>::linear(psi, 3);
  const auto tab = ParametricPolicy<double>::tabular(3, 3);
  Vec w(6);
  w << 0.1, -0.4, 0.7, 0.2, -0.3, 0.5;
  Vec wt(9);
  wt << 0.3, -1, 2, 0, 0, 0, 5, -5, 1;
  for (const auto* p : {&pol, &tab}) {
    const Vec& x = p == &pol ? w : wt;
    for (Index s = 0; s < 3; ++s) {
      CHECK(p->probabilities(x, s).sum() == doctest::Approx(1.0));
      for (Index a = 0; a < 3; ++a) {
        const Vec g = p->score(x, s, a);
        for (Index k = 0; k < x.size(); ++k) {
          Vec up = x, dn = x;
          up(k) += 1e-6;
          dn(k) -= 1e-6;
          const double fd = (p->log_probability(up, s, a) - p->log_probability(dn, s, a)) / 2e-6;
          CHECK(g(k) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
        }
      }
    }
  }
}

TEST_CASE("softmax stays finite for extreme preferences") {
  const auto tab = ParametricPolicy<double>::tabular(1, 2);
  Vec w(2);
  w << 800.0, -800.0;
  CHECK(tab.probability(w, 0, 0) == 1.0);
  CHECK(std::isfinite(tab.log_probability(w, 0, 1)));
}

TEST_CASE("exact value function solves the Bellman equation") {
  const auto env = make_random_mdp(4);
  const Mat pi = env.target_table();
  const Vec v = exact_value_function(env.mdp, pi);
  const Vec residual = expected_reward(env.mdp, pi) + env.mdp.discount() * policy_transition_matrix(env.mdp, pi) * v - v;
  CHECK(residual.lpNorm<Eigen::Infinity>() < 1e-12);
}
