#pragma once

#include <stdexcept>
#include <string>

namespace hsi {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on arguments was violated (caller bug or bad flag value).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Input data is unusable: failed invariants, unreadable files, empty selections.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A value type's invariant would be broken by the requested construction.
class InvariantViolation : public DataError {
 public:
  using DataError::DataError;
};

/// Configuration that cannot produce a valid result (degenerate layouts, infeasible separation).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  enum class Kind { Io, MagicMismatch, Truncated, SizeMismatch, NonFinite, RaggedRow, BadValue, Malformed };

  ParseError(Kind kind, const std::string& what) : DataError(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace hsi
