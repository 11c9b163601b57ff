#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cmfrac {

// Error categories map one-to-one onto the failure modes of the library
// operations; callers can catch the std base classes if they don't care.

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class OutOfRange : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class SingularInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when an analytic construction's hypotheses are not met. If the
// failure is a missing mesh point, `window_lo`/`window_hi` carry the
// interval that a refined mesh must hit.
class PreconditionViolation : public std::runtime_error {
 public:
  explicit PreconditionViolation(const std::string& what, double lo = 0.0,
                                 double hi = 0.0)
      : std::runtime_error(what), window_lo(lo), window_hi(hi) {}
  double window_lo;
  double window_hi;
};

class ConvergenceFailure : public std::runtime_error {
 public:
  ConvergenceFailure(const std::string& what, std::vector<double> history,
                     long step = -1)
      : std::runtime_error(what), residual_history(std::move(history)),
        step_index(step) {}
  std::vector<double> residual_history;
  long step_index;
};

}  // namespace cmfrac
