#pragma once

#include <stdexcept>
#include <string>

namespace fgs {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data or configuration does not satisfy a documented contract
// (malformed files, out-of-range spans, unknown labels, bad specs).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Text input could not be parsed. Carries the 1-based line number when known.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, int line = 0)
      : ValidationError(line > 0 ? "line " + std::to_string(line) + ": " + what
                                 : what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace fgs
