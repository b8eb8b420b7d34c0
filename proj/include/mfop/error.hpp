#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mfop {

/// Operands live on different windows, or an index falls outside the window.
class DimensionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative method hit its iteration cap. Carries the last iterate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_estimate, std::vector<double> last_iterate = {})
      : std::runtime_error(what), last_estimate_(last_estimate), last_iterate_(std::move(last_iterate)) {}

  double last_estimate() const noexcept { return last_estimate_; }
  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

 private:
  double last_estimate_;
  std::vector<double> last_iterate_;
};

/// Input violates a documented precondition (non-unitary u, non-positive lambda, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Rejection sampling gave up.
class RetryExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The window does not contain enough witnesses for the requested construction.
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The k-sparse approximant did not meet its norm budget.
class ApproximationBudgetError : public std::runtime_error {
 public:
  ApproximationBudgetError(const std::string& what, double achieved, double budget)
      : std::runtime_error(what), achieved_(achieved), budget_(budget) {}
  double achieved() const noexcept { return achieved_; }
  double budget() const noexcept { return budget_; }

 private:
  double achieved_;
  double budget_;
};

/// The basis-vector scan ran off the end of the window.
class WindowTooSmall : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A homotopy step lost invertibility after all refinement retries.
class PathCertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input (coordinate files, edge lists, metric tables).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mfop
