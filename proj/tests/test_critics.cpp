#include <doctest.h>

#include "offac/critics.hpp"
#include "offac/envs.hpp"

#include <cstring>
#include <sstream>

using namespace offac;

namespace {

bool bitwise_equal(const Vec& a, const Vec& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

std::vector<Transition<double>> stream(const Environment& env, const Mat& target, int n, std::uint64_t seed) {
  StreamGenerator gen(env, seed);
  std::vector<Transition<double>> xs;
  for (int i = 0; i < n; ++i) xs.push_back(gen.next(target));
  return xs;
}

}  // namespace

TEST_CASE("normalize_trace") {
  Vec e(2);
  e << 3, 4;
  const Vec n = normalize_trace(e);
  CHECK(n(0) == doctest::Approx(0.6));
  CHECK(n(1) == doctest::Approx(0.8));
  CHECK(normalize_trace(Vec(Vec::Zero(3))).isZero());
  const Vec u = Vec::Unit(4, 2);
  CHECK(normalize_trace(u) == u);
}

TEST_CASE("first step from reset uses e = phi for every lambda") {
  const auto env = make_random_mdp(1);
  const auto xs = stream(env, env.target_table(), 1, 3);
  for (double lambda : {0.0, 0.5, 1.0}) {
    CriticOptions<double> o{0.9, lambda, 0.1, 0.1, false};
    auto g = CriticState<double>::zeros(3, lambda);
    gtd_lambda_step(g, xs[0], o);
    CHECK(g.e == xs[0].phi);
    auto e = CriticState<double>::zeros(3, lambda);
    emphatic_td_step(e, xs[0], o);
    CHECK(e.m == 1.0);
    CHECK(e.e == xs[0].phi);
  }
}

TEST_CASE("lambda = 0 GTD trace is the current feature vector") {
  const auto env = make_random_mdp(2);
  auto c = CriticState<double>::zeros(3, 0.0);
  for (const auto& x : stream(env, env.target_table(), 200, 4)) {
    gtd_lambda_step(c, x, {0.9, 0.0, 0.05, 0.05, false});
    CHECK(c.e == x.phi);
  }
}

TEST_CASE("GTD(1) theta does not depend on the secondary weights") {
  const auto env = make_random_mdp(3);
  const auto xs = stream(env, env.target_table(), 500, 5);
  auto a = CriticState<double>::zeros(3, 1.0);
  auto b = CriticState<double>::zeros(3, 1.0);
  b.u = Vec::Constant(3, 50.0);
  for (const auto& x : xs) {
    gtd_lambda_step(a, x, {0.9, 1.0, 0.01, 0.01, false});
    gtd_lambda_step(b, x, {0.9, 1.0, 0.01, 0.01, false});
    REQUIRE(bitwise_equal(a.theta, b.theta));
  }
}

TEST_CASE("zero step sizes leave the weights alone but advance the traces") {
  const auto env = make_random_mdp(4);
  auto c = CriticState<double>::zeros(3, 0.5);
  c.theta << 1, 2, 3;
  const Vec theta = c.theta;
  const auto xs = stream(env, env.target_table(), 3, 6);
  for (const auto& x : xs) gtd_lambda_step(c, x, {0.9, 0.5, 0.0, 0.0, false});
  CHECK(c.theta == theta);
  CHECK(c.u.isZero());
  CHECK(c.rho_prev == xs.back().rho);
  CHECK(!c.e.isZero());
}

TEST_CASE("on-policy GTD matches TD where the correction term vanishes") {
  const auto env = make_random_mdp(5);
  const auto xs = stream(env, env.behavior.table(), 2000, 7);
  for (double lambda : {0.0, 0.4, 1.0}) {
    auto g = CriticState<double>::zeros(3, lambda);
    auto t = CriticState<double>::zeros(3, lambda);
    // lambda = 1: no u in the update; lambda < 1: u stays zero with alpha_u = 0
    const double alpha_u = lambda == 1.0 ? 0.02 : 0.0;
    for (const auto& x : xs) {
      REQUIRE(x.rho == 1.0);
      gtd_lambda_step(g, x, {0.9, lambda, 0.02, alpha_u, false});
      td_lambda_step(t, x, {0.9, lambda, 0.02, 0.0, false});
    }
    CHECK((g.theta - t.theta).norm() < 1e-12);
  }
}

TEST_CASE("Emphatic-TD(1) and GTD(1) are bitwise identical") {
  const auto env = make_random_mdp(6);
  const auto xs = stream(env, env.target_table(), 5000, 8);
  auto g = CriticState<double>::zeros(3, 1.0);
  auto e = CriticState<double>::zeros(3, 1.0);
  for (const auto& x : xs) {
    gtd_lambda_step(g, x, {0.9, 1.0, 0.01, 0.01, false});
    emphatic_td_step(e, x, {0.9, 1.0, 0.01, 0.0, false});
    REQUIRE(e.m == 1.0);
    REQUIRE(bitwise_equal(g.theta, e.theta));
    REQUIRE(bitwise_equal(g.e, e.e));
  }
}

TEST_CASE("on-policy emphasis converges to (1 - gamma lambda)/(1 - gamma)") {
  const auto env = make_random_mdp(7, 5, 3, 3, 0.9);
  const auto xs = stream(env, env.behavior.table(), 400, 9);
  for (double lambda : {0.0, 0.5, 1.0}) {
    auto c = CriticState<double>::zeros(3, lambda);
    for (const auto& x : xs) {
      emphatic_td_step(c, x, {0.9, lambda, 0.0, 0.0, false});
      REQUIRE(c.m > 0.0);
    }
    CHECK(std::abs(c.m - (1 - 0.9 * lambda) / (1 - 0.9)) < 1e-6);
  }
}

TEST_CASE("emphasis stays positive off-policy") {
  const auto env = make_random_mdp(8);
  auto c = CriticState<double>::zeros(3, 0.3);
  for (const auto& x : stream(env, env.target_table(), 20000, 10)) {
    emphatic_td_step(c, x, {0.9, 0.3, 0.001, 0.0, false});
    REQUIRE(c.m > 0.0);
  }
}

TEST_CASE("TD(0) is theta += alpha delta phi") {
  const auto env = make_random_mdp(9);
  const auto xs = stream(env, env.behavior.table(), 10, 11);
  auto c = CriticState<double>::zeros(3, 0.0);
  Vec theta = Vec::Zero(3);
  for (const auto& x : xs) {
    const double delta = x.reward + 0.9 * theta.dot(x.phi_next) - theta.dot(x.phi);
    theta += 0.1 * delta * x.phi;
    CHECK(td_lambda_step(c, x, {0.9, 0.0, 0.1, 0.0, false}) == doctest::Approx(delta));
    CHECK((c.theta - theta).norm() < 1e-14);
  }
}

TEST_CASE("non-finite weights raise DivergenceError with the step index") {
  const auto env = make_counterexample();
  Mat first(2, 2);
  first << 1, 0, 1, 0;
  auto c = CriticState<double>::zeros(1, 0.0);
  bool thrown = false;
  try {
    for (const auto& x : stream(env, first, 100000, 1)) gtd_lambda_step(c, x, {0.99, 0.0, 1e3, 1e3, false});
  } catch (const DivergenceError& ex) {
    thrown = true;
    CHECK(std::string(ex.what()).find("step") != std::string::npos);
  }
  CHECK(thrown);
}

TEST_CASE("TD(lambda) on the random walk reduces the error") {
  const auto env = make_random_walk_19();
  const Vec v = true_values(env);
  StreamGenerator gen(env, 12);
  auto c = CriticState<double>::zeros(19, 0.8);
  const double start = weighted_rms(env, c.theta, v);
  double mid = 0.0;
  int episodes = 0;
  while (episodes < 400) {
    const auto x = gen.next(env.target_table());
    td_lambda_step(c, x, {1.0, 0.8, 0.02, 0.0, false});
    if (x.terminal && ++episodes == 40) mid = weighted_rms(env, c.theta, v);
  }
  const double end = weighted_rms(env, c.theta, v);
  CHECK(mid < start);
  CHECK(end < mid);
  CHECK(end < 0.1);
}

TEST_CASE("terminal transitions clear the traces") {
  const auto env = make_random_walk_19();
  StreamGenerator gen(env, 13);
  auto c = CriticState<double>::zeros(19, 0.9);
  for (int i = 0; i < 5000; ++i) {
    const auto x = gen.next(env.target_table());
    emphatic_td_step(c, x, {1.0, 0.9, 0.01, 0.0, false});
    if (x.terminal) {
      CHECK(x.phi_next.isZero());
      CHECK(c.e.isZero());
      CHECK(c.m == 0.9);
      CHECK(c.rho_prev == 0.0);
    }
  }
}

TEST_CASE("identical seeds give identical critic trajectories") {
  const auto env = make_random_mdp(10);
  auto run = [&] {
    auto c = CriticState<double>::zeros(3, 0.5);
    for (const auto& x : stream(env, env.target_table(), 3000, 14)) emphatic_td_step(c, x, {0.9, 0.5, 0.01, 0.0, false});
    return c.theta;
  };
  CHECK(bitwise_equal(run(), run()));
}

TEST_CASE("trace log writes one row per step") {
  const auto env = make_random_mdp(11);
  std::ostringstream out;
  TraceLog log(out);
  auto c = CriticState<double>::zeros(3, 0.5);
  for (const auto& x : stream(env, env.target_table(), 4, 15)) log.write(c, gtd_lambda_step(c, x, {0.9, 0.5, 0.1, 0.1, false}));
  const std::string s = out.str();
  CHECK(s.rfind("t,delta,e_norm,m,theta_0,theta_1,theta_2\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 5);
}
