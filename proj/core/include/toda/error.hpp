#pragma once

#include <stdexcept>
#include <string>

namespace toda {

/// Parameter or input-data validation failure (bad N, non-finite entry, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A query fell outside the region where an object is defined: a tabulated
/// potential evaluated off its table, an eigenvalue outside a smoothing grid,
/// or a solver grid that truncates non-negligible mass.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative computation stopped before meeting its tolerance.
class NotConverged : public std::runtime_error {
 public:
  NotConverged(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Central P-differences produced more negative mass than the configured ceiling.
class StepSizeError : public std::runtime_error {
 public:
  StepSizeError(const std::string& what, double negativity)
      : std::runtime_error(what), negativity_(negativity) {}

  double negativity() const noexcept { return negativity_; }

 private:
  double negativity_;
};

}  // namespace toda
