// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace svabench {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Verilog frontend

/// Malformed Verilog. Carries a 1-based position and the tokens that would
/// have been accepted at that point.
class ParseError : public Error {
 public:
  ParseError(std::string message, int line, int column,
             std::vector<std::string> expected = {})
      : Error(format(message, line, column, expected)),
        message_(std::move(message)),
        line_(line),
        column_(column),
        expected_(std::move(expected)) {}

  const std::string& message() const { return message_; }
  int line() const { return line_; }
  int column() const { return column_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  static std::string format(const std::string& message, int line, int column,
                            const std::vector<std::string>& expected) {
    std::string out = std::to_string(line) + ":" + std::to_string(column) +
                      ": " + message;
    if (!expected.empty()) {
      out += " (expected ";
      for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i) out += i + 1 == expected.size() ? " or " : ", ";
        out += expected[i];
      }
      out += ")";
    }
    return out;
  }

  std::string message_;
  int line_;
  int column_;
  std::vector<std::string> expected_;
};

/// Legal Verilog that the supported subset does not cover.
class UnsupportedConstruct : public Error {
 public:
  UnsupportedConstruct(std::string construct, int line = 0, int column = 0)
      : Error((line > 0 ? std::to_string(line) + ":" + std::to_string(column) +
                              ": "
                        : std::string()) +
              "unsupported construct: " + construct),
        construct_(std::move(construct)),
        line_(line),
        column_(column) {}

  const std::string& construct() const { return construct_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string construct_;
  int line_;
  int column_;
};

class UnterminatedComment : public Error {
 public:
  explicit UnterminatedComment(std::size_t offset)
      : Error("unterminated block comment starting at byte " +
              std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class ElaborationError : public Error {
 public:
  using Error::Error;
};

class CombinationalLoop : public ElaborationError {
 public:
  explicit CombinationalLoop(std::vector<std::string> cycle)
      : ElaborationError("combinational loop: " + join(cycle)),
        cycle_(std::move(cycle)) {}
  const std::vector<std::string>& cycle() const { return cycle_; }

 private:
  static std::string join(const std::vector<std::string>& names) {
    std::string out;
    for (const auto& n : names) {
      if (!out.empty()) out += " -> ";
      out += n;
    }
    return out;
  }
  std::vector<std::string> cycle_;
};

class MultipleDrivers : public ElaborationError {
 public:
  explicit MultipleDrivers(const std::string& signal)
      : ElaborationError("signal '" + signal + "' has multiple drivers"),
        signal_(signal) {}
  const std::string& signal() const { return signal_; }

 private:
  std::string signal_;
};

class WidthMismatch : public ElaborationError {
 public:
  using ElaborationError::ElaborationError;
};

// ---------------------------------------------------------------------------
// Checker

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// LLM transport

class TransportError : public Error {
 public:
  TransportError(const std::string& what, bool retryable = false,
                 int status = 0)
      : Error(what), retryable_(retryable), status_(status) {}
  bool retryable() const { return retryable_; }
  int status() const { return status_; }

 private:
  bool retryable_;
  int status_;
};

class AuthError : public Error {
 public:
  using Error::Error;
};

/// The endpoint answered but produced an empty completion.
class ModelRefusal : public Error {
 public:
  using Error::Error;
};

class EmptyExampleSet : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Benchmark store / reporting

class MissingDirectory : public Error {
 public:
  using Error::Error;
};

class DuplicateName : public Error {
 public:
  using Error::Error;
};

class UnreadableFile : public Error {
 public:
  using Error::Error;
};

class InsufficientExamples : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class KeyMismatch : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace svabench
