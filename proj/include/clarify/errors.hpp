#pragma once

#include <stdexcept>
#include <string>

namespace clarify {

/// Root of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was not met by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Configuration file or binding could not be resolved.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The (state, event) pair is not an arc of the session state machine.
class IllegalTransition : public Error {
 public:
  using Error::Error;
};

/// A session event log has a sequence gap, a foreign record or replays
/// into an illegal transition.
class CorruptLog : public Error {
 public:
  using Error::Error;
};

/// Any failure talking to a model backend. The pipeline maps every
/// subclass to a BackendFailed event.
class BackendError : public Error {
 public:
  using Error::Error;
};

/// Every attempt failed with a transient error (timeout, 429, 5xx).
class BackendExhausted : public BackendError {
 public:
  BackendExhausted(const std::string& what, int attempts)
      : BackendError(what), attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

/// The backend answered but the payload could not be interpreted.
class InvalidResponse : public BackendError {
 public:
  using BackendError::BackendError;
};

/// Non-retryable rejection (auth failure, bad request, unknown model).
class BackendRejected : public BackendError {
 public:
  BackendRejected(const std::string& what, int http_status)
      : BackendError(what), http_status_(http_status) {}
  int http_status() const noexcept { return http_status_; }

 private:
  int http_status_;
};

class UnparseableLevel : public Error {
 public:
  using Error::Error;
};

class NoQuestionsParsed : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

/// Sample standard deviation is zero, so t and Cohen's d are undefined.
class DegenerateSample : public Error {
 public:
  DegenerateSample(const std::string& what, bool mean_equals_mu)
      : Error(what), mean_equals_mu_(mean_equals_mu) {}
  bool mean_equals_mu() const noexcept { return mean_equals_mu_; }

 private:
  bool mean_equals_mu_;
};

class EmptySequence : public Error {
 public:
  using Error::Error;
};

class PositiveLogProb : public Error {
 public:
  using Error::Error;
};

}  // namespace clarify
