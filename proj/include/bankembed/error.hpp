#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bankembed {

// Base class for all pipeline errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument or violated precondition. The CLI maps these to exit code 2.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Filesystem failure: missing input, unwritable output.
class IoError : public Error {
 public:
  using Error::Error;
};

// A CSV header does not contain the column the caller asked for.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A structured file does not parse; carries the offending line when known.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& msg, std::size_t line = 0)
      : Error(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_ = 0;
};

// Numeric failure during training or factorization.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A queried word is not part of the vocabulary.
class WordLookupError : public Error {
 public:
  using Error::Error;
};

// Input is structurally valid but carries no usable signal: an all-zero
// matrix, an empty corpus, a pair set with nothing eligible.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace bankembed
