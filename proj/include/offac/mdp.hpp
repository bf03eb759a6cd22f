#ifndef OFFAC_MDP_HPP
#define OFFAC_MDP_HPP

// Finite MDPs, policies, linear features and exact chain analysis.

#include "offac/types.hpp"

#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>
#include <utility>
#include <vector>

namespace offac {

namespace detail {

template <class Scalar>
Scalar stochastic_tolerance() {
  return Scalar(1e-12);
}

template <class Derived>
void check_row_stochastic(const Eigen::MatrixBase<Derived>& m, const char* what) {
  using Scalar = typename Derived::Scalar;
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (!(m(r, c) >= Scalar(0)))
        throw ModelError(std::string(what) + ": negative or non-finite probability in row " +
                         std::to_string(r));
    }
    if (std::abs(m.row(r).sum() - Scalar(1)) > stochastic_tolerance<Scalar>())
      throw ModelError(std::string(what) + ": row " + std::to_string(r) + " does not sum to 1");
  }
}

}  // namespace detail

/// Tabular model: P(s'|s,a) and r(s,a,s') stored as one [states x states]
/// matrix per action, plus a discount in [0,1).
template <class Scalar>
class FiniteMdp {
 public:
  FiniteMdp(std::vector<Matrix<Scalar>> transitions, std::vector<Matrix<Scalar>> rewards,
            Scalar discount)
      : transitions_(std::move(transitions)), rewards_(std::move(rewards)), discount_(discount) {
    if (transitions_.empty()) throw ModelError("FiniteMdp: at least one action required");
    if (rewards_.size() != transitions_.size())
      throw ModelError("FiniteMdp: one reward matrix per action required");
    const Index n = transitions_.front().rows();
    if (n <= 0) throw ModelError("FiniteMdp: at least one state required");
    for (std::size_t a = 0; a < transitions_.size(); ++a) {
      if (transitions_[a].rows() != n || transitions_[a].cols() != n || rewards_[a].rows() != n ||
          rewards_[a].cols() != n)
        throw ModelError("FiniteMdp: transition/reward matrices must be square and equal-sized");
      detail::check_row_stochastic(transitions_[a], "FiniteMdp transition");
      if (!rewards_[a].allFinite()) throw ModelError("FiniteMdp: rewards must be finite");
    }
    if (!(discount_ >= Scalar(0) && discount_ < Scalar(1)))
      throw ModelError("FiniteMdp: discount must lie in [0, 1)");
  }

  Index num_states() const { return transitions_.front().rows(); }
  Index num_actions() const { return static_cast<Index>(transitions_.size()); }
  Scalar discount() const { return discount_; }

  /// Row s, column s' holds P(s'|s,a).
  const Matrix<Scalar>& transition(Index a) const { return transitions_[static_cast<std::size_t>(a)]; }
  const Matrix<Scalar>& reward(Index a) const { return rewards_[static_cast<std::size_t>(a)]; }

  Scalar transition(Index s, Index a, Index next) const { return transition(a)(s, next); }
  Scalar reward(Index s, Index a, Index next) const { return reward(a)(s, next); }

  /// E[r | s, a].
  Scalar expected_reward(Index s, Index a) const {
    return transition(a).row(s).dot(reward(a).row(s));
  }

 private:
  std::vector<Matrix<Scalar>> transitions_;
  std::vector<Matrix<Scalar>> rewards_;
  Scalar discount_;
};

/// Feature matrix Phi with one row per state. Columns must be linearly
/// independent. A trailing all-ones column (intercept) is optional but several
/// identities only hold when it is present; see has_intercept().
template <class Scalar>
class LinearFeatureMap {
 public:
  explicit LinearFeatureMap(Matrix<Scalar> features) : features_(std::move(features)) {
    if (features_.cols() <= 0 || features_.rows() <= 0)
      throw ModelError("LinearFeatureMap: empty feature matrix");
    if (!features_.allFinite()) throw ModelError("LinearFeatureMap: non-finite feature");
    Eigen::ColPivHouseholderQR<Matrix<Scalar>> qr(features_);
    if (qr.rank() != features_.cols())
      throw RankError("LinearFeatureMap: feature columns are linearly dependent (rank " +
                      std::to_string(qr.rank()) + " < " + std::to_string(features_.cols()) + ")");
  }

  Index num_states() const { return features_.rows(); }
  Index num_features() const { return features_.cols(); }
  const Matrix<Scalar>& matrix() const { return features_; }
  auto row(Index s) const { return features_.row(s).transpose(); }

  bool has_intercept() const {
    return (features_.col(features_.cols() - 1).array() == Scalar(1)).all();
  }

 private:
  Matrix<Scalar> features_;
};

/// Stationary behavior policy table pi_b(a|s); every entry strictly positive.
template <class Scalar>
class FixedPolicy {
 public:
  explicit FixedPolicy(Matrix<Scalar> table) : table_(std::move(table)) {
    detail::check_row_stochastic(table_, "FixedPolicy");
    if ((table_.array() <= Scalar(0)).any())
      throw CoverageError("FixedPolicy: behavior must give every action positive probability");
  }

  static FixedPolicy uniform(Index num_states, Index num_actions) {
    return FixedPolicy(Matrix<Scalar>::Constant(num_states, num_actions,
                                                Scalar(1) / Scalar(num_actions)));
  }

  Index num_states() const { return table_.rows(); }
  Index num_actions() const { return table_.cols(); }
  Scalar probability(Index s, Index a) const { return table_(s, a); }
  const Matrix<Scalar>& table() const { return table_; }

 private:
  Matrix<Scalar> table_;
};

enum class PolicyKind { tabular_softmax, feature_softmax };

/// Softmax policy pi_w(a|s).
///  - tabular: one preference per (s,a), w[s * A + a];
///  - feature: preference w_a^T psi(s), w[a * n + j] with psi the rows of the
///    policy feature matrix.
template <class Scalar>
class ParametricPolicy {
 public:
  static ParametricPolicy tabular(Index num_states, Index num_actions) {
    return ParametricPolicy(PolicyKind::tabular_softmax, num_states, num_actions, Matrix<Scalar>());
  }

  static ParametricPolicy linear(Matrix<Scalar> features, Index num_actions) {
    const Index s = features.rows();
    return ParametricPolicy(PolicyKind::feature_softmax, s, num_actions, std::move(features));
  }

  PolicyKind kind() const { return kind_; }
  Index num_states() const { return num_states_; }
  Index num_actions() const { return num_actions_; }
  Index num_params() const {
    return kind_ == PolicyKind::tabular_softmax ? num_states_ * num_actions_
                                                : num_actions_ * features_.cols();
  }
  const Matrix<Scalar>& features() const { return features_; }

  Vector<Scalar> preferences(const Vector<Scalar>& w, Index s) const {
    check_params(w);
    if (kind_ == PolicyKind::tabular_softmax) return w.segment(s * num_actions_, num_actions_);
    const Index n = features_.cols();
    Vector<Scalar> pref(num_actions_);
    for (Index a = 0; a < num_actions_; ++a) pref(a) = w.segment(a * n, n).dot(features_.row(s));
    return pref;
  }

  Vector<Scalar> probabilities(const Vector<Scalar>& w, Index s) const {
    Vector<Scalar> pref = preferences(w, s);
    Vector<Scalar> p = (pref.array() - pref.maxCoeff()).exp().matrix();
    return p / p.sum();
  }

  Scalar probability(const Vector<Scalar>& w, Index s, Index a) const {
    return probabilities(w, s)(a);
  }

  Scalar log_probability(const Vector<Scalar>& w, Index s, Index a) const {
    Vector<Scalar> pref = preferences(w, s);
    const Scalar top = pref.maxCoeff();
    return pref(a) - top - std::log((pref.array() - top).exp().sum());
  }

  /// [states x actions] table of pi_w.
  Matrix<Scalar> table(const Vector<Scalar>& w) const {
    Matrix<Scalar> t(num_states_, num_actions_);
    for (Index s = 0; s < num_states_; ++s) t.row(s) = probabilities(w, s).transpose();
    return t;
  }

  /// Score function grad_w log pi_w(a|s).
  Vector<Scalar> score(const Vector<Scalar>& w, Index s, Index a) const {
    const Vector<Scalar> p = probabilities(w, s);
    Vector<Scalar> g = Vector<Scalar>::Zero(num_params());
    if (kind_ == PolicyKind::tabular_softmax) {
      g.segment(s * num_actions_, num_actions_) = -p;
      g(s * num_actions_ + a) += Scalar(1);
    } else {
      const Index n = features_.cols();
      for (Index b = 0; b < num_actions_; ++b) {
        const Scalar coef = (b == a ? Scalar(1) : Scalar(0)) - p(b);
        g.segment(b * n, n) = coef * features_.row(s).transpose();
      }
    }
    return g;
  }

 private:
  ParametricPolicy(PolicyKind kind, Index num_states, Index num_actions, Matrix<Scalar> features)
      : kind_(kind), num_states_(num_states), num_actions_(num_actions), features_(std::move(features)) {
    if (num_states_ <= 0 || num_actions_ <= 0)
      throw ModelError("ParametricPolicy: need at least one state and one action");
    if (kind_ == PolicyKind::feature_softmax && features_.cols() <= 0)
      throw ModelError("ParametricPolicy: feature softmax needs policy features");
  }

  void check_params(const Vector<Scalar>& w) const {
    if (w.size() != num_params())
      throw ModelError("ParametricPolicy: expected " + std::to_string(num_params()) +
                       " parameters, got " + std::to_string(w.size()));
  }

  PolicyKind kind_;
  Index num_states_;
  Index num_actions_;
  Matrix<Scalar> features_;
};

/// P^pi(s'|s) = sum_a pi(a|s) P(s'|s,a). `policy` is a [states x actions] table.
template <class Scalar>
Matrix<Scalar> policy_transition_matrix(const FiniteMdp<Scalar>& mdp, const Matrix<Scalar>& policy) {
  if (policy.rows() != mdp.num_states() || policy.cols() != mdp.num_actions())
    throw ModelError("policy table shape does not match the MDP");
  Matrix<Scalar> p = Matrix<Scalar>::Zero(mdp.num_states(), mdp.num_states());
  for (Index a = 0; a < mdp.num_actions(); ++a) p += policy.col(a).asDiagonal() * mdp.transition(a);
  return p;
}

/// R^pi(s) = sum_{a,s'} pi(a|s) P(s'|s,a) r(s,a,s').
template <class Scalar>
Vector<Scalar> expected_reward(const FiniteMdp<Scalar>& mdp, const Matrix<Scalar>& policy) {
  Vector<Scalar> r = Vector<Scalar>::Zero(mdp.num_states());
  for (Index a = 0; a < mdp.num_actions(); ++a)
    r += policy.col(a).cwiseProduct(
        mdp.transition(a).cwiseProduct(mdp.reward(a)).rowwise().sum());
  return r;
}

namespace detail {

// Strong connectivity and period of the support graph of P.
template <class Scalar>
std::pair<bool, Index> chain_structure(const Matrix<Scalar>& p) {
  const Index n = p.rows();
  auto reach_all = [&](bool reverse) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::queue<Index> q;
    q.push(0);
    seen[0] = 1;
    Index count = 1;
    while (!q.empty()) {
      const Index u = q.front();
      q.pop();
      for (Index v = 0; v < n; ++v) {
        const Scalar w = reverse ? p(v, u) : p(u, v);
        if (w > Scalar(0) && !seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          ++count;
          q.push(v);
        }
      }
    }
    return count == n;
  };
  if (!reach_all(false) || !reach_all(true)) return {false, 0};

  std::vector<Index> level(static_cast<std::size_t>(n), -1);
  std::queue<Index> q;
  q.push(0);
  level[0] = 0;
  Index period = 0;
  while (!q.empty()) {
    const Index u = q.front();
    q.pop();
    for (Index v = 0; v < n; ++v) {
      if (!(p(u, v) > Scalar(0))) continue;
      auto& lv = level[static_cast<std::size_t>(v)];
      if (lv < 0) {
        lv = level[static_cast<std::size_t>(u)] + 1;
        q.push(v);
      } else {
        const Index diff = level[static_cast<std::size_t>(u)] + 1 - lv;
        period = std::gcd(period, diff < 0 ? -diff : diff);
      }
    }
  }
  return {true, period};
}

}  // namespace detail

/// Stationary distribution d of a row-stochastic matrix (d^T P = d^T).
/// Dense solve up to 1000 states, power iteration above. Throws ChainError when
/// the chain is reducible, periodic, or yields a non-positive entry.
template <class Scalar>
Vector<Scalar> stationary_distribution(const Matrix<Scalar>& p) {
  const Index n = p.rows();
  if (n == 0 || p.cols() != n) throw ModelError("stationary_distribution: square matrix required");
  detail::check_row_stochastic(p, "stationary_distribution");

  const auto [irreducible, period] = detail::chain_structure(p);
  if (!irreducible) throw ChainError("chain not irreducible: some state is unreachable");
  if (period != 1)
    throw ChainError("chain not aperiodic: period " + std::to_string(period));

  Vector<Scalar> d;
  if (n <= 1000) {
    Matrix<Scalar> m = p.transpose() - Matrix<Scalar>::Identity(n, n);
    m.row(n - 1).setOnes();
    Vector<Scalar> rhs = Vector<Scalar>::Zero(n);
    rhs(n - 1) = Scalar(1);
    d = m.partialPivLu().solve(rhs);
  } else {
    d = Vector<Scalar>::Constant(n, Scalar(1) / Scalar(n));
    bool converged = false;
    for (int it = 0; it < 1000000 && !converged; ++it) {
      Vector<Scalar> next = p.transpose() * d;
      next /= next.sum();
      converged = (next - d).template lpNorm<1>() < Scalar(1e-14);
      d = std::move(next);
    }
    if (!converged) throw ChainError("chain not irreducible/aperiodic: power iteration did not converge");
  }

  if (!d.allFinite() || d.minCoeff() <= Scalar(1e-12))
    throw ChainError("chain not irreducible/aperiodic: stationary weight below tolerance");
  d /= d.sum();
  if ((p.transpose() * d - d).template lpNorm<Eigen::Infinity>() > Scalar(1e-10))
    throw ChainError("stationary_distribution: balance residual above 1e-10");
  return d;
}

/// V^pi = (I - gamma P^pi)^{-1} R^pi.
template <class Scalar>
Vector<Scalar> exact_value_function(const FiniteMdp<Scalar>& mdp, const Matrix<Scalar>& policy) {
  const Index n = mdp.num_states();
  const Matrix<Scalar> p = policy_transition_matrix(mdp, policy);
  const Vector<Scalar> r = expected_reward(mdp, policy);
  const Matrix<Scalar> lhs = Matrix<Scalar>::Identity(n, n) - mdp.discount() * p;
  Vector<Scalar> v = lhs.partialPivLu().solve(r);
  // one refinement step keeps the Bellman residual small for discounts near 1
  v += lhs.partialPivLu().solve(r - lhs * v);
  return v;
}

/// rho = pi(a|s) / pi_b(a|s).
template <class Scalar>
Scalar importance_ratio(Scalar target_probability, Scalar behavior_probability) {
  if (!(behavior_probability >= Scalar(1e-12)))
    throw CoverageError("importance ratio: behavior probability below 1e-12");
  return target_probability / behavior_probability;
}

template <class Scalar>
Scalar importance_ratio(const ParametricPolicy<Scalar>& target, const Vector<Scalar>& w,
                        const FixedPolicy<Scalar>& behavior, Index s, Index a) {
  return importance_ratio(target.probability(w, s, a), behavior.probability(s, a));
}

}  // namespace offac

#endif  // OFFAC_MDP_HPP
