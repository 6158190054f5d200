#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bhc {

/// Evaluation at (or a stencil crossing) a declared singular point, or
/// outside the field's domain of definition.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Analytic derivatives requested from a field that does not provide them.
class ModeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Parameters outside the range an operation is defined for (n < 4 in the
/// Aubin test, n = 4 in the isoparametric reduction, wrong pairing, ...).
class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IllConditionedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Base for solver failures; carries the last iterate for diagnostics.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::size_t iterations, double residual,
              std::vector<double> last_iterate = {})
      : std::runtime_error(what),
        iterations_(iterations),
        residual_(residual),
        last_iterate_(std::move(last_iterate)) {}

  std::size_t iterations() const { return iterations_; }
  double residual() const { return residual_; }
  const std::vector<double>& last_iterate() const { return last_iterate_; }

 private:
  std::size_t iterations_;
  double residual_;
  std::vector<double> last_iterate_;
};

class ConvergenceError : public SolverError {
 public:
  using SolverError::SolverError;
};

class PositivityError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Continuation could not produce even its first branch point.
class BranchError : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace bhc
