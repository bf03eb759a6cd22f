#ifndef OFFAC_ORACLE_HPP
#define OFFAC_ORACLE_HPP

// Closed-form ground truth for everything the incremental learners estimate.
//
// All expectations are under the stationary distribution d of the behavior
// chain. Writing P for P^pi, D = diag(d) and Phi for the feature matrix, the
// rows of the weighted trace matrix E are d(s) * lim E[e_t | s_t = s]:
//
//   gtd:       E = (I - gamma lambda P^T)^{-1} D Phi
//   emphatic:  E = (I - gamma lambda P^T)^{-1} diag(d .* m) Phi,
//              (I - gamma P^T)(d .* m) = d - gamma lambda P^T d
//
// and the projected fixed point solves A theta = b with
// A = E^T (I - gamma P) Phi, b = E^T R^pi.

#include "offac/mdp.hpp"

#include <functional>
#include <limits>

namespace offac {

/// Strictly positive state weighting d that sums to one.
template <class Scalar>
class ProjectionWeights {
 public:
  explicit ProjectionWeights(Vector<Scalar> d) : d_(std::move(d)) {
    if (d_.size() == 0 || !d_.allFinite() || d_.minCoeff() <= Scalar(0))
      throw ModelError("ProjectionWeights: weights must be finite and strictly positive");
    if (std::abs(d_.sum() - Scalar(1)) > Scalar(1e-10))
      throw ModelError("ProjectionWeights: weights must sum to 1");
  }

  const Vector<Scalar>& vector() const { return d_; }
  auto diagonal() const { return d_.asDiagonal(); }
  Index size() const { return d_.size(); }

 private:
  Vector<Scalar> d_;
};

template <class Scalar>
ProjectionWeights<Scalar> behavior_weights(const FiniteMdp<Scalar>& mdp,
                                           const FixedPolicy<Scalar>& behavior) {
  return ProjectionWeights<Scalar>(
      stationary_distribution(policy_transition_matrix(mdp, behavior.table())));
}

template <class Scalar>
struct FixedPointReport {
  Scalar lambda{};
  TraceKind kind{TraceKind::gtd};
  Vector<Scalar> theta;
  Matrix<Scalar> a;  ///< A(lambda) (its transpose is E[rho (phi - gamma phi') e^T])
  Vector<Scalar> b;
  Scalar condition{};
  Scalar residual{};
};

/// m(s) = lim E[m_t | s_t = s] and f(s) = lim E[e_t | s_t = s]^T eta(lambda).
template <class Scalar>
struct EmphasisVectors {
  Vector<Scalar> m;
  Vector<Scalar> f;
};

namespace detail {

template <class Scalar>
Matrix<Scalar> identity(Index n) {
  return Matrix<Scalar>::Identity(n, n);
}

template <class Scalar>
Scalar condition_number(const Matrix<Scalar>& a) {
  Eigen::JacobiSVD<Matrix<Scalar>> svd(a);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return Scalar(0);
  const Scalar smallest = sv(sv.size() - 1);
  if (!(smallest > Scalar(0))) return std::numeric_limits<Scalar>::infinity();
  return sv(0) / smallest;
}

template <class Scalar>
void check_shapes(const FiniteMdp<Scalar>& mdp, const LinearFeatureMap<Scalar>& features,
                  const Matrix<Scalar>& target) {
  if (features.num_states() != mdp.num_states())
    throw ModelError("feature map has " + std::to_string(features.num_states()) +
                     " rows for an MDP with " + std::to_string(mdp.num_states()) + " states");
  if (target.rows() != mdp.num_states() || target.cols() != mdp.num_actions())
    throw ModelError("target policy table shape does not match the MDP");
}

}  // namespace detail

/// Theta of the d-weighted least-squares projection of V^pi onto span(Phi).
template <class Scalar>
Vector<Scalar> mse_solution(const FiniteMdp<Scalar>& mdp, const LinearFeatureMap<Scalar>& features,
                            const Matrix<Scalar>& target, const ProjectionWeights<Scalar>& d) {
  detail::check_shapes(mdp, features, target);
  const Matrix<Scalar>& phi = features.matrix();
  const Matrix<Scalar> gram = phi.transpose() * d.diagonal() * phi;
  Eigen::FullPivLU<Matrix<Scalar>> lu(gram);
  if (!lu.isInvertible()) throw RankError("mse_solution: Gram matrix Phi^T D Phi is singular");
  return lu.solve(phi.transpose() * (d.diagonal() * exact_value_function(mdp, target)));
}

/// m(s) = lim E[m_t | s_t = s] for m_t = 1 + gamma rho_{t-1} (m_{t-1} - lambda).
template <class Scalar>
Vector<Scalar> emphasis_weights(const FiniteMdp<Scalar>& mdp, const Matrix<Scalar>& target,
                                const ProjectionWeights<Scalar>& d, Scalar lambda) {
  const Index n = mdp.num_states();
  const Matrix<Scalar> pt = policy_transition_matrix(mdp, target).transpose();
  const Scalar gamma = mdp.discount();
  const Vector<Scalar> dm = (detail::identity<Scalar>(n) - gamma * pt)
                                .partialPivLu()
                                .solve(d.vector() - gamma * lambda * (pt * d.vector()));
  return dm.cwiseQuotient(d.vector());
}

template <class Scalar>
Matrix<Scalar> expected_trace_matrix(const FiniteMdp<Scalar>& mdp,
                                     const LinearFeatureMap<Scalar>& features,
                                     const Matrix<Scalar>& target, const ProjectionWeights<Scalar>& d,
                                     Scalar lambda, TraceKind kind) {
  detail::check_shapes(mdp, features, target);
  if (!(lambda >= Scalar(0) && lambda <= Scalar(1)))
    throw ModelError("expected_trace_matrix: lambda must lie in [0, 1]");
  const Index n = mdp.num_states();
  const Scalar gamma = mdp.discount();
  const Matrix<Scalar> pt = policy_transition_matrix(mdp, target).transpose();

  Vector<Scalar> weight = d.vector();
  if (kind == TraceKind::emphatic) weight = weight.cwiseProduct(emphasis_weights(mdp, target, d, lambda));

  const Matrix<Scalar> lhs = detail::identity<Scalar>(n) - gamma * lambda * pt;
  Eigen::PartialPivLU<Matrix<Scalar>> lu(lhs);
  if (!(std::abs(lu.determinant()) > Scalar(0)))
    throw RankError("expected_trace_matrix: I - gamma lambda P^T is singular");
  return lu.solve(weight.asDiagonal() * features.matrix());
}

template <class Scalar>
FixedPointReport<Scalar> td_fixed_point(const FiniteMdp<Scalar>& mdp,
                                        const LinearFeatureMap<Scalar>& features,
                                        const Matrix<Scalar>& target,
                                        const ProjectionWeights<Scalar>& d, Scalar lambda,
                                        TraceKind kind) {
  const Index n = mdp.num_states();
  const Matrix<Scalar> p = policy_transition_matrix(mdp, target);
  const Matrix<Scalar> e = expected_trace_matrix(mdp, features, target, d, lambda, kind);

  FixedPointReport<Scalar> report;
  report.lambda = lambda;
  report.kind = kind;
  report.a = e.transpose() * (detail::identity<Scalar>(n) - mdp.discount() * p) * features.matrix();
  report.b = e.transpose() * expected_reward(mdp, target);
  report.condition = detail::condition_number(report.a);
  if (!(report.condition < Scalar(1e14)))
    throw RankError(std::string("td_fixed_point: A(lambda) is singular for the ") + to_string(kind) +
                    " system; check feature rank and behavior coverage of the target");
  report.theta = report.a.partialPivLu().solve(report.b);
  report.residual = (report.a * report.theta - report.b).norm();
  return report;
}

template <class Scalar>
FixedPointReport<Scalar> td_fixed_point(const FiniteMdp<Scalar>& mdp,
                                        const LinearFeatureMap<Scalar>& features,
                                        const Matrix<Scalar>& target,
                                        const FixedPolicy<Scalar>& behavior, Scalar lambda,
                                        TraceKind kind) {
  return td_fixed_point(mdp, features, target, behavior_weights(mdp, behavior), lambda, kind);
}

/// Limit of E[f_t | s_t = s] for the followon f_t = 1 + gamma rho_{t-1} f_{t-1}:
/// D f = (I - gamma P^T)^{-1} d.
template <class Scalar>
Vector<Scalar> f_vector(const FiniteMdp<Scalar>& mdp, const Matrix<Scalar>& target,
                        const ProjectionWeights<Scalar>& d) {
  const Index n = mdp.num_states();
  const Matrix<Scalar> pt = policy_transition_matrix(mdp, target).transpose();
  const Vector<Scalar> df =
      (detail::identity<Scalar>(n) - mdp.discount() * pt).partialPivLu().solve(d.vector());
  return df.cwiseQuotient(d.vector());
}

template <class Scalar>
Vector<Scalar> f_vector(const FiniteMdp<Scalar>& mdp, const Matrix<Scalar>& target,
                        const FixedPolicy<Scalar>& behavior) {
  return f_vector(mdp, target, behavior_weights(mdp, behavior));
}

/// eta(lambda) = A(lambda)^{-T} E[phi].
template <class Scalar>
Vector<Scalar> eta_vector(const FixedPointReport<Scalar>& system,
                          const LinearFeatureMap<Scalar>& features,
                          const ProjectionWeights<Scalar>& d) {
  Eigen::FullPivLU<Matrix<Scalar>> lu(system.a.transpose());
  if (!lu.isInvertible()) throw RankError("eta_vector: A(lambda) is singular");
  return lu.solve(features.matrix().transpose() * d.vector());
}

template <class Scalar>
EmphasisVectors<Scalar> emphasis_vectors(const FiniteMdp<Scalar>& mdp,
                                         const LinearFeatureMap<Scalar>& features,
                                         const Matrix<Scalar>& target,
                                         const ProjectionWeights<Scalar>& d, Scalar lambda,
                                         TraceKind kind) {
  const auto system = td_fixed_point(mdp, features, target, d, lambda, kind);
  const Matrix<Scalar> e = expected_trace_matrix(mdp, features, target, d, lambda, kind);
  EmphasisVectors<Scalar> out;
  out.m = kind == TraceKind::emphatic ? emphasis_weights(mdp, target, d, lambda)
                                      : Vector<Scalar>::Ones(mdp.num_states());
  out.f = (e * eta_vector(system, features, d)).cwiseQuotient(d.vector());
  return out;
}

/// Residual of sum_s d(s) (phi(s) - gamma (P Phi)(s)) f(s) = sum_s d(s) phi(s).
template <class Scalar>
Scalar followon_residual(const FiniteMdp<Scalar>& mdp, const LinearFeatureMap<Scalar>& features,
                         const Matrix<Scalar>& target, const ProjectionWeights<Scalar>& d,
                         const Vector<Scalar>& f) {
  const Index n = mdp.num_states();
  const Matrix<Scalar>& phi = features.matrix();
  const Matrix<Scalar> td_features =
      (detail::identity<Scalar>(n) - mdp.discount() * policy_transition_matrix(mdp, target)) * phi;
  return (td_features.transpose() * d.vector().cwiseProduct(f) - phi.transpose() * d.vector())
      .template lpNorm<Eigen::Infinity>();
}

/// J = d^T Phi theta*(target) for the chosen critic solution.
template <class Scalar>
Scalar exact_objective(const FiniteMdp<Scalar>& mdp, const LinearFeatureMap<Scalar>& features,
                       const Matrix<Scalar>& target, const ProjectionWeights<Scalar>& d,
                       Scalar lambda, TraceKind kind) {
  const auto report = td_fixed_point(mdp, features, target, d, lambda, kind);
  return d.vector().dot(features.matrix() * report.theta);
}

template <class Scalar>
Scalar exact_objective(const FiniteMdp<Scalar>& mdp, const LinearFeatureMap<Scalar>& features,
                       const ParametricPolicy<Scalar>& policy, const Vector<Scalar>& w,
                       const ProjectionWeights<Scalar>& d, Scalar lambda, TraceKind kind) {
  return exact_objective(mdp, features, policy.table(w), d, lambda, kind);
}

/// Central differences (J(w + eps u_k) - J(w - eps u_k)) / (2 eps).
template <class Scalar, class Objective>
Vector<Scalar> finite_difference_gradient(Objective&& objective, const Vector<Scalar>& w, Scalar eps) {
  if (!(eps >= Scalar(1e-7) && eps <= Scalar(1e-3)))
    throw ConfigError("finite difference step must lie in [1e-7, 1e-3]");
  Vector<Scalar> grad(w.size());
  Vector<Scalar> probe = w;
  for (Index k = 0; k < w.size(); ++k) {
    probe(k) = w(k) + eps;
    const Scalar up = objective(probe);
    probe(k) = w(k) - eps;
    const Scalar down = objective(probe);
    probe(k) = w(k);
    grad(k) = (up - down) / (Scalar(2) * eps);
  }
  return grad;
}

template <class Scalar>
Vector<Scalar> finite_difference_grad_J(const FiniteMdp<Scalar>& mdp,
                                        const LinearFeatureMap<Scalar>& features,
                                        const ParametricPolicy<Scalar>& policy,
                                        const ProjectionWeights<Scalar>& d, const Vector<Scalar>& w,
                                        Scalar lambda, TraceKind kind, Scalar eps) {
  return finite_difference_gradient<Scalar>(
      [&](const Vector<Scalar>& x) { return exact_objective(mdp, features, policy, x, d, lambda, kind); },
      w, eps);
}

namespace detail {

// delta(s,a) = E[r + gamma V(s') | s, a] - V(s) for V = Phi theta.
template <class Scalar>
Matrix<Scalar> expected_td_errors(const FiniteMdp<Scalar>& mdp, const Vector<Scalar>& values) {
  Matrix<Scalar> out(mdp.num_states(), mdp.num_actions());
  for (Index a = 0; a < mdp.num_actions(); ++a) {
    const Vector<Scalar> r = mdp.transition(a).cwiseProduct(mdp.reward(a)).rowwise().sum();
    out.col(a) = r + mdp.discount() * (mdp.transition(a) * values) - values;
  }
  return out;
}

}  // namespace detail

/// Exact stationary mean of rho_t delta_t psi_t for the score trace
///   psi_t = f_t grad log pi_t + z_t + gamma lambda rho_{t-1} psi_{t-1}
/// with the emphatic followon f_t and z_t = grad m_t, theta fixed at `theta`.
/// With lambda = 1 this is the Gradient-AC trace (m_t = 1, z_t = 0).
template <class Scalar>
Vector<Scalar> expected_score_trace_update(const FiniteMdp<Scalar>& mdp,
                                           const LinearFeatureMap<Scalar>& features,
                                           const ParametricPolicy<Scalar>& policy,
                                           const Vector<Scalar>& w, const ProjectionWeights<Scalar>& d,
                                           Scalar lambda, const Vector<Scalar>& theta) {
  const Index ns = mdp.num_states();
  const Index na = mdp.num_actions();
  const Index k = policy.num_params();
  const Scalar gamma = mdp.discount();
  const Matrix<Scalar> pi = policy.table(w);
  const Matrix<Scalar> pt = policy_transition_matrix(mdp, pi).transpose();
  const Matrix<Scalar> eye = detail::identity<Scalar>(ns);

  const Vector<Scalar> dm = d.vector().cwiseProduct(emphasis_weights(mdp, pi, d, lambda));
  const Vector<Scalar> dfl = (eye - gamma * lambda * pt).partialPivLu().solve(dm);
  const Vector<Scalar> excess = dm - lambda * d.vector();

  // Row s of the [states x K] matrices below is d(s) times a conditional mean.
  Matrix<Scalar> z_source = Matrix<Scalar>::Zero(ns, k);
  for (Index s = 0; s < ns; ++s)
    for (Index a = 0; a < na; ++a)
      z_source += (gamma * pi(s, a) * excess(s)) * mdp.transition(a).row(s).transpose() *
                  policy.score(w, s, a).transpose();
  const Matrix<Scalar> z = (eye - gamma * pt).partialPivLu().solve(z_source);

  Matrix<Scalar> carry_source = Matrix<Scalar>::Zero(ns, k);
  for (Index s = 0; s < ns; ++s)
    for (Index a = 0; a < na; ++a)
      carry_source += (gamma * lambda * pi(s, a)) * mdp.transition(a).row(s).transpose() *
                      (dfl(s) * policy.score(w, s, a) + z.row(s).transpose()).transpose();
  const Matrix<Scalar> carry = (eye - gamma * lambda * pt).partialPivLu().solve(carry_source);

  const Matrix<Scalar> delta = detail::expected_td_errors(mdp, Vector<Scalar>(features.matrix() * theta));
  Vector<Scalar> out = Vector<Scalar>::Zero(k);
  for (Index s = 0; s < ns; ++s)
    for (Index a = 0; a < na; ++a)
      out += (pi(s, a) * delta(s, a)) *
             (dfl(s) * policy.score(w, s, a) + z.row(s).transpose() + carry.row(s).transpose());
  return out;
}

/// Exact stationary mean of rho_t delta_t grad log pi_w(a_t|s_t) (the Off-PAC
/// direction; with behavior == target it is the classical actor direction).
template <class Scalar>
Vector<Scalar> expected_score_update(const FiniteMdp<Scalar>& mdp,
                                     const LinearFeatureMap<Scalar>& features,
                                     const ParametricPolicy<Scalar>& policy, const Vector<Scalar>& w,
                                     const ProjectionWeights<Scalar>& d, const Vector<Scalar>& theta) {
  const Matrix<Scalar> pi = policy.table(w);
  const Matrix<Scalar> delta = detail::expected_td_errors(mdp, Vector<Scalar>(features.matrix() * theta));
  Vector<Scalar> out = Vector<Scalar>::Zero(policy.num_params());
  for (Index s = 0; s < mdp.num_states(); ++s)
    for (Index a = 0; a < mdp.num_actions(); ++a)
      out += (d.vector()(s) * pi(s, a) * delta(s, a)) * policy.score(w, s, a);
  return out;
}

}  // namespace offac

#endif  // OFFAC_ORACLE_HPP
