#pragma once

#include <stdexcept>
#include <string>

namespace fgl {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class NotPositiveSemiDefinite : public Error {
 public:
  using Error::Error;
};

class DegenerateVariance : public Error {
 public:
  using Error::Error;
};

class UnsupportedDesign : public Error {
 public:
  using Error::Error;
};

/// Raised by the CSV/JSON readers; carries the 1-based location of the fault.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, std::size_t column,
             const std::string& what)
      : Error(source + ":" + std::to_string(line) + ":" + std::to_string(column) +
              ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace fgl
