#pragma once

#include <stdexcept>
#include <string>

namespace rigp {

/// Base class for all library errors. `code()` is a short stable token
/// suitable for machine consumption (the CLI prints it verbatim).
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// A point or region lies outside the admissible domain of a kernel or dataset.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain_error", what) {}
};

/// Caller broke a documented precondition (shape mismatch, unsorted input...).
class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& what)
      : Error("contract_violation", what) {}
};

/// Cholesky factorization failed even after the maximum diagonal jitter.
class IllConditionedCovariance : public Error {
 public:
  IllConditionedCovariance(const std::string& what, double min_eigenvalue)
      : Error("ill_conditioned_covariance", what), min_eigenvalue_(min_eigenvalue) {}

  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

class EstimationFailure : public Error {
 public:
  explicit EstimationFailure(const std::string& what)
      : Error("estimation_failure", what) {}
};

class InitializationFailure : public Error {
 public:
  explicit InitializationFailure(const std::string& what)
      : Error("initialization_failure", what) {}
};

}  // namespace rigp
