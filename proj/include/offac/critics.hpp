#ifndef OFFAC_CRITICS_HPP
#define OFFAC_CRITICS_HPP

// Incremental O(n) linear critics: TD(lambda), GTD(lambda), Emphatic-TD(lambda).
//
// Every trace recursion consumes rho_prev (the ratio of the previous step) and
// only then replaces it by the current ratio. A terminal transition carries
// phi_next = 0 and clears the traces after the update.

#include "offac/types.hpp"

#include <cassert>
#include <cstdint>
#include <ostream>

namespace offac {

template <class Scalar>
struct Transition {
  Index state = 0;
  Index action = 0;
  Index next_state = 0;
  Vector<Scalar> phi;
  Vector<Scalar> phi_next;
  Scalar reward{};
  Scalar rho{1};
  bool terminal = false;
};

template <class Scalar>
struct CriticState {
  Vector<Scalar> theta;
  Vector<Scalar> e;
  Vector<Scalar> u;
  Scalar m{};
  Scalar rho_prev{};
  std::uint64_t t = 0;

  static CriticState zeros(Index n, Scalar lambda) {
    CriticState s;
    s.theta = Vector<Scalar>::Zero(n);
    s.u = Vector<Scalar>::Zero(n);
    s.e = Vector<Scalar>::Zero(n);
    s.m = lambda;
    return s;
  }

  /// Episode boundary: the weights survive, the traces do not.
  void reset_traces(Scalar lambda) {
    e.setZero();
    m = lambda;
    rho_prev = Scalar(0);
  }
};

template <class Scalar>
struct CriticOptions {
  Scalar gamma{};
  Scalar lambda{};
  Scalar alpha{};
  Scalar alpha_u{};
  bool normalize = false;
};

template <class Derived>
typename Derived::PlainObject normalize_trace(const Eigen::MatrixBase<Derived>& e) {
  using Scalar = typename Derived::Scalar;
  const Scalar norm = e.norm();
  if (norm > Scalar(1e-12)) return e / norm;
  return e;
}

namespace detail {

template <class Scalar>
void check_options(const CriticOptions<Scalar>& o) {
  if (!(o.lambda >= Scalar(0) && o.lambda <= Scalar(1))) throw ConfigError("lambda must lie in [0, 1]");
  if (!(o.alpha >= Scalar(0)) || !(o.alpha_u >= Scalar(0))) throw ConfigError("step sizes must be >= 0");
}

template <class Scalar>
void finish_step(CriticState<Scalar>& c, const Transition<Scalar>& x, Scalar lambda) {
  if (!c.theta.allFinite() || !c.u.allFinite() || !c.e.allFinite())
    throw DivergenceError("critic diverged at step " + std::to_string(c.t));
  c.rho_prev = x.rho;
  ++c.t;
  if (x.terminal) c.reset_traces(lambda);
}

template <class Scalar>
Scalar td_error(const Vector<Scalar>& theta, const Transition<Scalar>& x, Scalar gamma) {
  return x.reward + gamma * theta.dot(x.phi_next) - theta.dot(x.phi);
}

}  // namespace detail

/// GTD(lambda). Returns delta.
template <class Scalar>
Scalar gtd_lambda_step(CriticState<Scalar>& c, const Transition<Scalar>& x, const CriticOptions<Scalar>& o) {
  detail::check_options(o);
  c.e = x.phi + (o.gamma * o.lambda * c.rho_prev) * c.e;
  if (o.normalize) c.e = normalize_trace(c.e);
  const Scalar delta = detail::td_error(c.theta, x, o.gamma);
  if (o.lambda < Scalar(1)) {
    const Scalar correction = o.gamma * (Scalar(1) - o.lambda) * c.e.dot(c.u);
    c.theta += (o.alpha * x.rho) * (delta * c.e - correction * x.phi_next);
  } else {
    c.theta += (o.alpha * x.rho) * (delta * c.e);
  }
  c.u += o.alpha_u * (x.rho * delta * c.e - c.u.dot(x.phi) * x.phi);
  detail::finish_step(c, x, o.lambda);
  return delta;
}

/// Emphatic-TD(lambda). Returns delta.
template <class Scalar>
Scalar emphatic_td_step(CriticState<Scalar>& c, const Transition<Scalar>& x, const CriticOptions<Scalar>& o) {
  detail::check_options(o);
  c.m = Scalar(1) + o.gamma * c.rho_prev * (c.m - o.lambda);
  if (!(c.m > Scalar(0)))
    throw InvariantError("emphasis m_t = " + std::to_string(static_cast<double>(c.m)) +
                         " is not positive at step " + std::to_string(c.t));
  c.e = c.m * x.phi + (o.gamma * o.lambda * c.rho_prev) * c.e;
  if (o.normalize) c.e = normalize_trace(c.e);
  const Scalar delta = detail::td_error(c.theta, x, o.gamma);
  c.theta += (o.alpha * x.rho) * (delta * c.e);
  detail::finish_step(c, x, o.lambda);
  return delta;
}

/// On-policy accumulating-trace TD(lambda). Returns delta.
template <class Scalar>
Scalar td_lambda_step(CriticState<Scalar>& c, const Transition<Scalar>& x, const CriticOptions<Scalar>& o) {
  assert(x.rho == Scalar(1) && "td_lambda_step requires an on-policy stream");
  detail::check_options(o);
  c.e = x.phi + (o.gamma * o.lambda) * c.e;
  if (o.normalize) c.e = normalize_trace(c.e);
  const Scalar delta = detail::td_error(c.theta, x, o.gamma);
  c.theta += (o.alpha * delta) * c.e;
  detail::finish_step(c, x, o.lambda);
  return delta;
}

template <class Scalar>
Scalar critic_step(TraceKind kind, CriticState<Scalar>& c, const Transition<Scalar>& x,
                   const CriticOptions<Scalar>& o) {
  return kind == TraceKind::gtd ? gtd_lambda_step(c, x, o) : emphatic_td_step(c, x, o);
}

/// Optional per-step debugging log: t,delta,e_norm,m,theta_0,...
class TraceLog {
 public:
  explicit TraceLog(std::ostream& out) : out_(&out) {}

  template <class Scalar>
  void write(const CriticState<Scalar>& c, Scalar delta) {
    if (!header_done_) {
      *out_ << "t,delta,e_norm,m";
      for (Index i = 0; i < c.theta.size(); ++i) *out_ << ",theta_" << i;
      *out_ << '\n';
      header_done_ = true;
    }
    *out_ << c.t << ',' << delta << ',' << c.e.norm() << ',' << c.m;
    for (Index i = 0; i < c.theta.size(); ++i) *out_ << ',' << c.theta(i);
    *out_ << '\n';
  }

 private:
  std::ostream* out_;
  bool header_done_ = false;
};

}  // namespace offac

#endif  // OFFAC_CRITICS_HPP
