#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace smog {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Invalid arguments, dimension mismatches, precondition violations.
/// CLI exit code 2.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical rank loss: the data does not support the requested rank k.
/// Carries the offending k-th singular value. CLI exit code 3.
class DegeneracyError : public std::runtime_error {
 public:
  DegeneracyError(const std::string& msg, double sigma_k)
      : std::runtime_error(msg), sigma_k_(sigma_k) {}
  double sigma_k() const { return sigma_k_; }

 private:
  double sigma_k_;
};

/// The projection direction eta produced repeated or vanishing eigenvalues;
/// the caller should re-draw eta. CLI exit code 3.
class EtaCollisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A trial direction theta landed nearly orthogonal to an eigenvector;
/// the caller should pick another trial. CLI exit code 3.
class IllConditionedTrialError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// All source excess kurtoses appear to be zero (singular cumulant Hessian
/// after repeated re-draws). CLI exit code 3.
class KurtosisDegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File read/write failure. CLI exit code 4.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace smog
