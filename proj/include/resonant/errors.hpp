#pragma once

#include <stdexcept>
#include <string>

namespace resonant {

/// Right-hand side evaluated where the equations are singular.
class SingularityError : public std::runtime_error {
 public:
  SingularityError(const std::string& what, double s)
      : std::runtime_error(what + " (s = " + std::to_string(s) + ")"), s_(s) {}
  double s() const noexcept { return s_; }

 private:
  double s_;
};

/// The adaptive integrator could not make progress.
class StepSizeUnderflow : public std::runtime_error {
 public:
  StepSizeUnderflow(double s, double h)
      : std::runtime_error("step size underflow at s = " + std::to_string(s) +
                           " (h = " + std::to_string(h) + ")"),
        s_(s) {}
  double s() const noexcept { return s_; }

 private:
  double s_;
};

/// Mass pushed past the coefficient truncation exceeded the allowed level.
class TruncationSpillError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested point lies outside the sampled or valid domain.
class OutOfDomainError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

}  // namespace resonant
