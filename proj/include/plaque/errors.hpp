#pragma once

#include <stdexcept>
#include <string>

namespace plaque {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

/// The deformation gradient is not orientation preserving (det F <= 0).
class SingularDeformation : public Error {
public:
  using Error::Error;
};

/// The channel half-width dropped to or below the configured minimum.
class ChannelClosure : public Error {
public:
  using Error::Error;
};

/// An iteration (micro periodicity loop, parareal loop) hit its cap.
class NonConvergence : public Error {
public:
  using Error::Error;
};

/// The reaction-diffusion linear system could not be solved.
class LinearSolverFailure : public Error {
public:
  using Error::Error;
};

/// Invalid scenario or schedule configuration.
class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace plaque
