#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace specforge {

// Base for all domain errors raised by the library. Callers that only need
// "something went wrong in the domain" catch this; the subclasses let the
// CLI and the HTTP facade map failures onto exit codes and status codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (JSON, CSV, rule files). Carries a 1-based line when known.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Input parsed but violates a structural or referential invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Unknown element id, table, menu, library entry and the like.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

// Operation not permitted in the current state (empty selection, answering a
// finished session, undo with an empty journal).
class StateError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace specforge
