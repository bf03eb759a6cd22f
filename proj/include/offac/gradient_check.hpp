#ifndef OFFAC_GRADIENT_CHECK_HPP
#define OFFAC_GRADIENT_CHECK_HPP

#include "offac/actors.hpp"
#include "offac/envs.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace offac {

/// Estimates the stationary mean of the actor's sampling vector with theta and
/// w frozen, and compares it with central differences of the exact objective.
struct GradientCheckOptions {
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::vector<double> emphatic_lambdas{0.0, 0.5, 1.0};
  bool gradient_ac = true;
  bool counterexample = true;
  std::uint64_t steps = 10'000'000;
  double eps = 1e-5;
  double gamma = 0.5;
  Index states = 5;
  Index actions = 3;
  Index features = 3;
  double max_condition = 1e6;
  double tolerance = 0.02;
  double significant = 1e-3;
  std::uint64_t stream_seed = 7;
};

struct GradientCheckRow {
  std::string instance;
  std::uint64_t seed = 0;
  ActorKind algorithm = ActorKind::gradient_ac;
  double lambda = 1.0;
  Vec fd;       ///< central-difference gradient of J
  Vec mc;       ///< sample mean of rho delta psi
  Vec se;       ///< batch-means standard error of mc
  Vec exact;    ///< closed-form stationary mean of rho delta psi
  double max_rel_error = 0.0;
  double max_rel_error_exact = 0.0;
  bool pass = false;
  bool skipped = false;
  std::string reason;
};

/// One instance, one algorithm. w is the target parameter vector.
GradientCheckRow check_gradient(const Environment& env, const Vec& w, ActorKind algorithm, double lambda,
                                std::uint64_t steps, double eps, std::uint64_t stream_seed, double tolerance,
                                double significant);

/// Instances with cond(A(0)) above max_condition are skipped, not failed.
std::vector<GradientCheckRow> run_gradient_check(const GradientCheckOptions& options);

void write_gradient_check_csv(std::ostream& out, const std::vector<GradientCheckRow>& rows);

}  // namespace offac

#endif  // OFFAC_GRADIENT_CHECK_HPP
