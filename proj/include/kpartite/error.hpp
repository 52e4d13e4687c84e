#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace kpartite {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed graph / state document. The message carries line or field context.
class FormatError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotPositiveDefinite : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotPositiveSemidefinite : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotMetzler : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A graph hypothesis required by an operation does not hold.
class AssumptionViolation : public Error {
 public:
  using Error::Error;
};

class HomogeneityViolation : public AssumptionViolation {
 public:
  HomogeneityViolation(std::size_t row_cluster, std::size_t col_cluster, double spread);

  std::size_t row_cluster() const noexcept { return row_cluster_; }
  std::size_t col_cluster() const noexcept { return col_cluster_; }
  double max_spread() const noexcept { return spread_; }

 private:
  std::size_t row_cluster_;
  std::size_t col_cluster_;
  double spread_;
};

/// No hub candidate leaves at most one cluster failing close friendship.
/// failures()[hub] lists the clusters that fail for that hub.
class Assumption3Violation : public AssumptionViolation {
 public:
  explicit Assumption3Violation(std::vector<std::vector<std::size_t>> failures);
  const std::vector<std::vector<std::size_t>>& failures() const noexcept { return failures_; }

 private:
  std::vector<std::vector<std::size_t>> failures_;
};

class SynthesisError : public Error {
 public:
  using Error::Error;
};

class ZeroPivot : public SynthesisError {
 public:
  explicit ZeroPivot(std::size_t stage);
  std::size_t stage() const noexcept { return stage_; }

 private:
  std::size_t stage_;
};

class IntermediateBlockNotPD : public SynthesisError {
 public:
  explicit IntermediateBlockNotPD(std::size_t stage);
  std::size_t stage() const noexcept { return stage_; }

 private:
  std::size_t stage_;
};

class SynthesisFailed : public SynthesisError {
 public:
  SynthesisFailed(int doublings, std::string failing_check);
  int doublings() const noexcept { return doublings_; }
  const std::string& failing_check() const noexcept { return check_; }

 private:
  int doublings_;
  std::string check_;
};

class DivergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace kpartite
