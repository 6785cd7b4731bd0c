#pragma once

#include <stdexcept>
#include <string>

namespace nl2sql {

/// Base of every error raised by the library. `kind()` is the stable tag the
/// CLI prints in its machine-readable error line.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "io"; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "config"; }
};

class TemplateError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "template"; }
};

/// Failure talking to a model provider or database. Retried by RetryPolicy
/// when `retriable()`.
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& what, bool retriable = true)
      : Error(what), retriable_(retriable) {}
  bool retriable() const noexcept { return retriable_; }
  const char* kind() const noexcept override { return "transport"; }

 private:
  bool retriable_;
};

class CassetteMissError : public Error {
 public:
  explicit CassetteMissError(std::string fingerprint)
      : Error("cassette miss: no recorded response for fingerprint " + fingerprint),
        fingerprint_(std::move(fingerprint)) {}
  const std::string& fingerprint() const noexcept { return fingerprint_; }
  const char* kind() const noexcept override { return "cassette_miss"; }

 private:
  std::string fingerprint_;
};

class SqlParseError : public Error {
 public:
  SqlParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(message + " at " + std::to_string(line) + ":" + std::to_string(column)),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const char* kind() const noexcept override { return "sql_parse"; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class ExecutionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "execution"; }
};

class GuardrailError : public ExecutionError {
 public:
  using ExecutionError::ExecutionError;
  const char* kind() const noexcept override { return "guardrail"; }
};

class TimeoutError : public ExecutionError {
 public:
  using ExecutionError::ExecutionError;
  const char* kind() const noexcept override { return "timeout"; }
};

class DbConnectionError : public TransportError {
 public:
  explicit DbConnectionError(const std::string& what) : TransportError(what, false) {}
  const char* kind() const noexcept override { return "db_connection"; }
};

class PlanValidationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "plan_validation"; }
};

class WorkflowError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "workflow"; }
};

}  // namespace nl2sql
