#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace htsne {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied argument is outside its documented range.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Input data violates a structural invariant (non-finite values, bad shape).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A text or binary file could not be decoded.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
      : Error(what), row_(row), column_(column) {}

  /// 1-based row of the offending record, 0 when not applicable.
  std::size_t row() const noexcept { return row_; }
  /// 1-based column of the offending cell, 0 when not applicable.
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// The optimisation produced non-finite values.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace htsne
