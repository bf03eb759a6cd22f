#ifndef OFFAC_TYPES_HPP
#define OFFAC_TYPES_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace offac {

using Index = Eigen::Index;

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vec = Vector<double>;
using Mat = Matrix<double>;

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model object was built from data that breaks one of its invariants.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// The behavior chain has no unique, strictly positive stationary distribution.
class ChainError : public Error {
 public:
  using Error::Error;
};

/// Behavior policy gives (near) zero probability to an action the target uses.
class CoverageError : public Error {
 public:
  using Error::Error;
};

/// A linear system that must be invertible is singular.
class RankError : public Error {
 public:
  using Error::Error;
};

/// A learner produced non-finite parameters.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Internal invariant trap (emphasis turned non-positive, ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Which projected fixed point / trace recursion is meant.
enum class TraceKind { gtd, emphatic };

inline const char* to_string(TraceKind kind) {
  return kind == TraceKind::gtd ? "gtd" : "emphatic";
}

inline TraceKind trace_kind_from_string(const std::string& s) {
  if (s == "gtd") return TraceKind::gtd;
  if (s == "emphatic") return TraceKind::emphatic;
  throw ConfigError("unknown trace kind '" + s + "' (expected gtd or emphatic)");
}

}  // namespace offac

#endif  // OFFAC_TYPES_HPP
