#ifndef OFFAC_ACTORS_HPP
#define OFFAC_ACTORS_HPP

// Actors driven by a linear critic. Each step consumes one sampled
// behavior transition, computes rho with the pre-update w, advances the
// critic and then moves w.

#include "offac/critics.hpp"
#include "offac/mdp.hpp"

#include <string>

namespace offac {

enum class ActorKind { gradient_ac, emphatic_ac, offpac, onpolicy };

inline const char* to_string(ActorKind kind) {
  switch (kind) {
    case ActorKind::gradient_ac: return "gradient_ac";
    case ActorKind::emphatic_ac: return "emphatic_ac";
    case ActorKind::offpac: return "offpac";
    case ActorKind::onpolicy: return "onpolicy";
  }
  return "?";
}

inline ActorKind actor_kind_from_string(const std::string& s) {
  if (s == "gradient_ac") return ActorKind::gradient_ac;
  if (s == "emphatic_ac") return ActorKind::emphatic_ac;
  if (s == "offpac") return ActorKind::offpac;
  if (s == "onpolicy") return ActorKind::onpolicy;
  throw ConfigError("unknown actor '" + s + "' (expected gradient_ac, emphatic_ac, offpac or onpolicy)");
}

template <class Scalar>
struct ActorState {
  Vector<Scalar> w;
  Vector<Scalar> psi;
  Vector<Scalar> z;
  Vector<Scalar> last_update;  ///< rho delta psi of the latest step (before beta)
  Scalar f{};
  Scalar m{};
  Scalar f_lambda{};
  Scalar rho_prev{};
  Index prev_state = -1;
  Index prev_action = -1;
  std::uint64_t t = 0;

  static ActorState start(Vector<Scalar> w0, Scalar lambda) {
    ActorState a;
    a.w = std::move(w0);
    a.psi = Vector<Scalar>::Zero(a.w.size());
    a.z = Vector<Scalar>::Zero(a.w.size());
    a.last_update = Vector<Scalar>::Zero(a.w.size());
    a.reset_traces(lambda);
    return a;
  }

  void reset_traces(Scalar lambda) {
    psi.setZero();
    z.setZero();
    f = Scalar(0);
    f_lambda = Scalar(0);
    m = lambda;
    rho_prev = Scalar(0);
    prev_state = -1;
    prev_action = -1;
  }
};

template <class Scalar>
struct ActorOptions {
  Scalar gamma{};
  Scalar lambda{1};
  Scalar alpha{};
  Scalar alpha_u{};
  Scalar beta{};
  Scalar w_max{1e3};
  bool normalize = false;

  CriticOptions<Scalar> critic() const { return {gamma, lambda, alpha, alpha_u, normalize}; }
};

namespace detail {

template <class Scalar>
void move_actor(ActorState<Scalar>& a, Scalar beta, Scalar w_max) {
  a.w += beta * a.last_update;
  a.w = a.w.cwiseMax(-w_max).cwiseMin(w_max);
  if (!a.w.allFinite()) throw DivergenceError("actor diverged at step " + std::to_string(a.t));
  ++a.t;
}

template <class Scalar>
void stamp_ratio(Transition<Scalar>& x, const ParametricPolicy<Scalar>& policy, const Vector<Scalar>& w,
                 const FixedPolicy<Scalar>& behavior) {
  x.rho = importance_ratio(policy, w, behavior, x.state, x.action);
}

// Shared body of Gradient-AC and Emphatic-AC. With lambda = 1, m stays at 1,
// z stays at 0 and f_lambda is the Gradient-AC followon f.
template <class Scalar>
Scalar score_trace_step(TraceKind kind, ActorState<Scalar>& a, CriticState<Scalar>& c,
                        const ParametricPolicy<Scalar>& policy, const FixedPolicy<Scalar>& behavior,
                        Transition<Scalar> x, const ActorOptions<Scalar>& o) {
  const Scalar gamma = o.gamma;
  const Scalar lambda = o.lambda;
  const Scalar m_old = a.m;
  a.m = Scalar(1) + gamma * a.rho_prev * (m_old - lambda);
  a.f_lambda = a.m + (gamma * lambda * a.rho_prev) * a.f_lambda;
  a.f = a.f_lambda;
  if (a.prev_state >= 0 && lambda < Scalar(1))
    a.z = (gamma * a.rho_prev) * ((m_old - lambda) * policy.score(a.w, a.prev_state, a.prev_action) + a.z);
  a.psi = a.f_lambda * policy.score(a.w, x.state, x.action) + a.z + (gamma * lambda * a.rho_prev) * a.psi;

  stamp_ratio(x, policy, a.w, behavior);
  const Scalar delta = critic_step(kind, c, x, o.critic());
  a.last_update = (x.rho * delta) * a.psi;
  detail::move_actor(a, o.beta, o.w_max);

  a.rho_prev = x.rho;
  a.prev_state = x.state;
  a.prev_action = x.action;
  if (x.terminal) a.reset_traces(lambda);
  return delta;
}

}  // namespace detail

/// Gradient-AC: GTD(1) critic, followon f_t = 1 + gamma rho_{t-1} f_{t-1},
/// psi_t = f_t grad log pi_t + gamma rho_{t-1} psi_{t-1}, w += beta rho delta psi.
template <class Scalar>
Scalar gradient_ac_step(ActorState<Scalar>& a, CriticState<Scalar>& c, const ParametricPolicy<Scalar>& policy,
                        const FixedPolicy<Scalar>& behavior, const Transition<Scalar>& x,
                        ActorOptions<Scalar> o) {
  o.lambda = Scalar(1);
  return detail::score_trace_step(TraceKind::gtd, a, c, policy, behavior, x, o);
}

/// Emphatic-AC(lambda) with an Emphatic-TD(lambda) critic:
///   m_t   = 1 + gamma rho_{t-1} (m_{t-1} - lambda)
///   f^l_t = m_t + gamma lambda rho_{t-1} f^l_{t-1}
///   z_t   = gamma rho_{t-1} ((m_{t-1} - lambda) grad log pi_{t-1} + z_{t-1})
///   psi_t = f^l_t grad log pi_t + z_t + gamma lambda rho_{t-1} psi_{t-1}
/// The previous score is re-evaluated at the current w.
template <class Scalar>
Scalar emphatic_ac_step(ActorState<Scalar>& a, CriticState<Scalar>& c, const ParametricPolicy<Scalar>& policy,
                        const FixedPolicy<Scalar>& behavior, const Transition<Scalar>& x,
                        const ActorOptions<Scalar>& o) {
  return detail::score_trace_step(TraceKind::emphatic, a, c, policy, behavior, x, o);
}

/// Off-PAC baseline: GTD(lambda) critic, w += beta rho delta grad log pi.
template <class Scalar>
Scalar offpac_actor_step(ActorState<Scalar>& a, CriticState<Scalar>& c, const ParametricPolicy<Scalar>& policy,
                         const FixedPolicy<Scalar>& behavior, Transition<Scalar> x, const ActorOptions<Scalar>& o) {
  detail::stamp_ratio(x, policy, a.w, behavior);
  const Vector<Scalar> score = policy.score(a.w, x.state, x.action);
  const Scalar delta = gtd_lambda_step(c, x, o.critic());
  a.last_update = (x.rho * delta) * score;
  detail::move_actor(a, o.beta, o.w_max);
  a.rho_prev = x.rho;
  if (x.terminal) a.reset_traces(o.lambda);
  return delta;
}

/// Classical on-policy actor: TD(lambda) critic, w += beta delta grad log pi.
template <class Scalar>
Scalar onpolicy_ac_step(ActorState<Scalar>& a, CriticState<Scalar>& c, const ParametricPolicy<Scalar>& policy,
                        Transition<Scalar> x, const ActorOptions<Scalar>& o) {
  x.rho = Scalar(1);
  const Vector<Scalar> score = policy.score(a.w, x.state, x.action);
  const Scalar delta = td_lambda_step(c, x, o.critic());
  a.last_update = delta * score;
  detail::move_actor(a, o.beta, o.w_max);
  if (x.terminal) a.reset_traces(o.lambda);
  return delta;
}

}  // namespace offac

#endif  // OFFAC_ACTORS_HPP
