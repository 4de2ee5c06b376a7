#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cloudq {

/// Base of every error raised by the simulator library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Engine
class PastEvent : public Error { using Error::Error; };
class HorizonExceeded : public Error { using Error::Error; };

// Model
class ZeroRate : public Error { using Error::Error; };
class ZeroBandwidth : public Error { using Error::Error; };

// Policies
class EmptyDatacenter : public Error { using Error::Error; };
class EmptyQueue : public Error { using Error::Error; };
class DuplicateJobId : public Error { using Error::Error; };
class UnknownVm : public Error { using Error::Error; };

// Metrics
class EmptyInput : public Error { using Error::Error; };
class NeverStarted : public Error { using Error::Error; };
class NoSubmissions : public Error { using Error::Error; };

// Output
class IoError : public Error { using Error::Error; };
class UnknownKind : public Error { using Error::Error; };

/// Anything wrong with a scenario as written: the CLI maps these to exit 2.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

/// Malformed scenario text. Line and column are 1-based; 0 means unknown.
class ParseError : public ScenarioError {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : ScenarioError(format(what, line, column)), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t line,
                            std::size_t column) {
    if (line == 0) return what;
    return std::to_string(line) + ":" + std::to_string(column) + ": " + what;
  }

  std::size_t line_;
  std::size_t column_;
};

class UnknownKey : public ParseError {
 public:
  using ParseError::ParseError;
};

class ValidationError : public ScenarioError {
 public:
  using ScenarioError::ScenarioError;
};

}  // namespace cloudq
