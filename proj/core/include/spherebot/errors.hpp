#pragma once

#include <stdexcept>
#include <string>

namespace spherebot {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of a formula (e.g. |q_r| >= pi/2).
class DomainError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// Non-finite state produced by the integrator. Carries the failing time.
class IntegrationFault : public Error {
 public:
  IntegrationFault(const std::string& what, double time)
      : Error(what + " (t = " + std::to_string(time) + " s)"), time_(time) {}
  /// Same fault with a context prefix.
  IntegrationFault(const std::string& context, const IntegrationFault& inner)
      : Error(context + ": " + inner.what()), time_(inner.time()) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Control-law denominator vanished for the given gains and state.
class DegenerateGainError : public Error {
 public:
  using Error::Error;
};

class QpError : public Error {
 public:
  using Error::Error;
};

class InfeasibleAnchorError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace spherebot
