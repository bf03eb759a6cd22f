#include <doctest.h>

#include "offac/envs.hpp"

using namespace offac;

TEST_CASE("counterexample dynamics") {
  const auto env = make_counterexample();
  CHECK(env.mdp.transition(0, 0, 1) == 1.0);
  CHECK(env.mdp.transition(1, 0, 1) == 1.0);
  CHECK(env.mdp.transition(0, 1, 0) == 1.0);
  CHECK(env.mdp.transition(1, 1, 0) == 1.0);
  CHECK(env.mdp.reward(0, 0, 1) == 1.0);
  CHECK(env.mdp.reward(1, 1, 0) == 0.0);
  CHECK(env.features.matrix()(0, 0) == 1.0);
  CHECK(env.features.matrix()(1, 0) == 2.0);
  CHECK_FALSE(env.features.has_intercept());
  CHECK(env.weights.vector()(0) == doctest::Approx(2.0 / 3.0));

  Mat first(2, 2);
  first << 1, 0, 1, 0;
  const Vec v = exact_value_function(env.mdp, first);
  CHECK(v(0) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(v(1) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK_THROWS_AS(make_counterexample(0.99, 0.0), ModelError);
  CHECK_THROWS_AS(make_counterexample(1.0, 0.5), ModelError);
}

TEST_CASE("counterexample transition for action 0 from state 0") {
  const auto env = make_counterexample();
  StreamGenerator gen(env, 1);
  for (int i = 0; i < 100; ++i) {
    const auto x = gen.next();
    if (x.state == 0 && x.action == 0) {
      CHECK(x.phi(0) == 1.0);
      CHECK(x.reward == 1.0);
      CHECK(x.phi_next(0) == 2.0);
      return;
    }
  }
  FAIL("no (state 0, action 0) transition in 100 steps");
}

TEST_CASE("always taking action 0 stays in state 1 after the first step") {
  Environment env = make_counterexample(0.99, 0.999999);
  Mat b(2, 2);
  b << 1.0 - 1e-15, 1e-15, 1.0 - 1e-15, 1e-15;
  env.behavior = FixedPolicy<double>(b);
  StreamGenerator gen(env, 2);
  gen.next();
  for (int i = 0; i < 1000; ++i) CHECK(gen.next().state == 1);
}

TEST_CASE("random walk values, center and uniform RMS of zero") {
  const auto env = make_random_walk_19();
  const Vec v = true_values(env);
  CHECK(std::abs(v(10)) < 1e-9);
  CHECK(v(1) == doctest::Approx(-0.9).epsilon(1e-6));
  CHECK(v(19) == doctest::Approx(0.9).epsilon(1e-6));
  double ss = 0.0;
  for (Index i = 1; i <= 19; ++i) ss += v(i) * v(i);
  CHECK(std::sqrt(ss / 19.0) == doctest::Approx(0.5477).epsilon(1e-4));
  CHECK(uniform_rms(env, Vec::Zero(19), v) == doctest::Approx(0.5477).epsilon(1e-4));
}

TEST_CASE("random walk episodes end with a zero next feature and restart in the center") {
  const auto env = make_random_walk_19();
  StreamGenerator gen(env, 3);
  int episodes = 0;
  for (int i = 0; i < 20000 && episodes < 20; ++i) {
    const auto x = gen.next();
    if (x.terminal) {
      ++episodes;
      CHECK(x.phi_next.isZero());
      CHECK((x.next_state == 0 || x.next_state == 20));
      CHECK(x.reward == (x.next_state == 0 ? -1.0 : 1.0));
      CHECK(gen.state() == 10);
    } else {
      CHECK(x.reward == 0.0);
    }
  }
  CHECK(episodes == 20);
}

TEST_CASE("random MDPs are deterministic and valid") {
  const auto a = make_random_mdp(42);
  const auto b = make_random_mdp(42);
  CHECK(a.features.matrix() == b.features.matrix());
  CHECK(a.initial_w == b.initial_w);
  for (Index k = 0; k < 3; ++k) CHECK(a.mdp.transition(k) == b.mdp.transition(k));
  CHECK(a.features.has_intercept());
  for (Index k = 0; k < 3; ++k) CHECK(a.mdp.transition(k).minCoeff() >= 0.01);
  CHECK_THROWS_AS(make_random_mdp(1, 5, 3, 6), ModelError);
  CHECK_THROWS_AS(make_random_mdp(1, 5, 3, 1), ModelError);
}

TEST_CASE("conditioning of A(0) on 1000 random draws") {
  int good = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto env = make_random_mdp(seed);
    const auto fp = td_fixed_point(env.mdp, env.features, env.target_table(), env.weights, 0.0, TraceKind::gtd);
    good += fp.condition <= 1e6;
  }
  CHECK(good >= 950);
}

TEST_CASE("empirical state and action frequencies match d and the behavior policy") {
  const auto env = make_random_mdp(7);
  StreamGenerator gen(env, 8);
  const int n = 1'000'000;
  Vec visits = Vec::Zero(5);
  Mat actions = Mat::Zero(5, 3);
  for (int i = 0; i < n; ++i) {
    const auto x = gen.next();
    visits(x.state) += 1;
    actions(x.state, x.action) += 1;
  }
  const Vec freq = visits / n;
  for (Index s = 0; s < 5; ++s) {
    CHECK(std::abs(freq(s) - env.weights.vector()(s)) <= 0.01 * env.weights.vector()(s));
    for (Index a = 0; a < 3; ++a)
      CHECK(std::abs(actions(s, a) / visits(s) - env.behavior.probability(s, a)) <= 0.01 * env.behavior.probability(s, a));
  }
}

TEST_CASE("streams are reproducible from the seed") {
  const auto env = make_random_mdp(9);
  StreamGenerator a(env, 77), b(env, 77);
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next(env.policy, env.initial_w);
    const auto y = next_transition(b, env.policy, env.initial_w);
    REQUIRE(x.state == y.state);
    REQUIRE(x.action == y.action);
    REQUIRE(x.rho == y.rho);
  }
}
