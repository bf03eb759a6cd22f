#ifndef OFFAC_SCHEDULE_HPP
#define OFFAC_SCHEDULE_HPP

#include "offac/types.hpp"

#include <cmath>
#include <cstdint>

namespace offac {

/// alpha_t = alpha0 / (1 + t / tau)^kappa. kappa = 0 gives a constant step.
struct StepSchedule {
  double alpha0 = 0.01;
  double tau = 1e4;
  double kappa = 1.0;

  double operator()(std::uint64_t t) const {
    if (kappa == 0.0) return alpha0;
    return alpha0 / std::pow(1.0 + static_cast<double>(t) / tau, kappa);
  }

  bool is_constant() const { return kappa == 0.0; }

  /// sum alpha_t = inf and sum alpha_t^2 < inf.
  bool robbins_monro() const { return kappa > 0.5 && kappa <= 1.0; }

  void validate(bool allow_constant) const {
    if (!(alpha0 >= 0.0) || !std::isfinite(alpha0)) throw ConfigError("step size alpha0 must be finite and >= 0");
    if (!(tau > 0.0)) throw ConfigError("schedule tau must be > 0");
    if (is_constant() && allow_constant) return;
    if (!robbins_monro())
      throw ConfigError("schedule kappa must lie in (0.5, 1] (got " + std::to_string(kappa) +
                        "); use kappa = 0 only where constant steps are allowed");
  }
};

/// Critic on alpha, actor on beta. The usual regime has the actor slower
/// (beta_t / alpha_t -> 0); `actor_faster` flips the ratio so the critic is
/// the slower one.
struct TwoTimescale {
  StepSchedule critic;
  StepSchedule actor;
  bool actor_faster = false;

  void validate() const {
    critic.validate(false);
    actor.validate(false);
    const double kc = critic.kappa;
    const double ka = actor.kappa;
    if (!actor_faster && !(ka > kc || (ka == kc && actor.alpha0 == 0.0)))
      throw ConfigError("two-timescale: actor kappa must exceed critic kappa so beta/alpha -> 0");
    if (actor_faster && !(kc > ka))
      throw ConfigError("two-timescale (actor_faster): critic kappa must exceed actor kappa");
  }
};

}  // namespace offac

#endif  // OFFAC_SCHEDULE_HPP
