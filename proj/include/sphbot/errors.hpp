#pragma once

#include <stdexcept>
#include <string>

namespace sphbot {

/// Bad input: parameters, configs, schedules, files. The CLI maps it to exit 2.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Failure while evaluating or integrating the dynamics. The CLI maps it to exit 1.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// |theta| came too close to pi/2, where the YXZ chain degenerates.
class GimbalError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class SingularSystemError : public NumericalError {
public:
  SingularSystemError(const std::string& what, double rcond)
      : NumericalError(what), rcond_(rcond) {}

  double rcond() const noexcept { return rcond_; }

private:
  double rcond_;
};

/// Step size fell below the underflow floor; the problem is too stiff for the
/// explicit integrator at the requested tolerance.
class StepUnderflowError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class AnalysisError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace sphbot
