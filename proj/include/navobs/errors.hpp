#ifndef NAVOBS_ERRORS_HPP
#define NAVOBS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace navobs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violated a documented precondition (shape, sign, structure).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// vee3 called on a matrix that is not skew-symmetric.
class NotSkew : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Matrix handed to Rotation is not orthonormal with det +1.
class InvalidRotation : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Numerical failures: these map to exit code 3 in the CLI.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Covariance lost positive definiteness after a Riccati step.
class NonPositive : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Innovation covariance C P C^T + Q could not be factored.
class SingularInnovation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Trajectory profile name not recognised.
class UnknownProfile : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Experiment configuration could not be parsed or validated.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace navobs

#endif  // NAVOBS_ERRORS_HPP
