#ifndef OFFAC_COUNTEREXAMPLE_HPP
#define OFFAC_COUNTEREXAMPLE_HPP

#include "offac/envs.hpp"
#include "offac/actors.hpp"
#include "offac/schedule.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace offac {

/// Preference increments along u = e(s0,a0) - e(s0,a1), i.e. "raise pi(a0|s0)",
/// with theta frozen at the oracle fixed points (GTD(0) for Off-PAC, GTD(1) for
/// Gradient-AC). Optional live runs record pi_w(a0|s0) with learning critics.
struct CounterexampleOptions {
  double gamma = 0.99;
  double behavior_p1 = 1.0 / 3.0;
  std::uint64_t steps = 10'000;
  int runs = 100;
  std::vector<double> initial_w{2.0, 0.0, 2.0, 0.0};
  std::uint64_t seed = 1;
  double z = 2.5758293035489;  ///< two-sided 99% normal quantile
  // live runs
  bool live = false;
  TwoTimescale schedule{{3e-4, 1e4, 0.6}, {1e-4, 1e4, 1.0}, false};
  std::uint64_t record_every = 100;
};

struct SignTest {
  ActorKind algorithm = ActorKind::offpac;
  double theta = 0.0;
  double exact = 0.0;   ///< closed-form expected increment along u
  double mean = 0.0;    ///< mean over runs of the per-run average increment
  double se = 0.0;
  bool expected_positive = false;
  bool confident = false;  ///< mean is z standard errors on the expected side
};

struct ProbabilityTrace {
  ActorKind algorithm = ActorKind::offpac;
  std::vector<std::uint64_t> steps;
  std::vector<double> mean_pi;
  std::vector<double> se_pi;
};

struct CounterexampleReport {
  double gamma = 0.0;
  double behavior_p1 = 0.0;
  Vec d;
  double theta_gtd0_deterministic = 0.0;  ///< target "always a0", GTD(0)
  double theta_closed_form = 0.0;         ///< 2 / (3 - 4 gamma) at p1 = 1/3
  double theta_gtd1_deterministic = 0.0;
  double theta_mse_deterministic = 0.0;
  Vec w0;
  double pi_a0 = 0.0;
  std::vector<SignTest> sign_tests;
  std::vector<ProbabilityTrace> traces;
};

CounterexampleReport run_counterexample_comparison(const CounterexampleOptions& options);

void write_counterexample_report(std::ostream& out, const CounterexampleReport& report);

/// Gradient-AC with a live GTD(1) critic on the counterexample, exact J(w_t)
/// averaged over runs.
struct AscentOptions {
  double gamma = 0.99;
  double behavior_p1 = 1.0 / 3.0;
  std::uint64_t steps = 100'000;
  int runs = 100;
  std::uint64_t seed = 1;
  TwoTimescale schedule{{3e-4, 1e4, 0.6}, {1e-4, 1e4, 1.0}, false};
  std::uint64_t record_every = 10'000;
  std::vector<double> initial_w{0.0, 0.0, 0.0, 0.0};
};

struct AscentReport {
  std::vector<std::uint64_t> steps;
  std::vector<double> mean_j;
  std::vector<double> se_j;
  int diverged = 0;
};

AscentReport run_j_ascent(const AscentOptions& options);

}  // namespace offac

#endif  // OFFAC_COUNTEREXAMPLE_HPP
