#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace csclir {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input. Carries the 1-based line number when one is known.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_ = 0;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

// Shapes, sizes or ids that do not line up.
class MismatchError : public Error {
 public:
  using Error::Error;
};

// Input for which a statistic is undefined (zero variance, too few samples).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace csclir
