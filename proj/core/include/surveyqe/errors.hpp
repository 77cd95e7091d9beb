#pragma once

#include <stdexcept>
#include <string>

namespace surveyqe {

// Base for every error the library reports. Callers that only care about
// success/failure can catch this; the CLI maps the subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: malformed files, violated preconditions, inconsistent artifacts.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A query with no searchable terms left after analysis.
class EmptyQueryError : public ValidationError {
 public:
  EmptyQueryError() : ValidationError("empty query") {}
  explicit EmptyQueryError(const std::string& what) : ValidationError(what) {}
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Unknown document or topic identifier.
class LookupError : public Error {
 public:
  using Error::Error;
};

}  // namespace surveyqe
