#ifndef SPDC_ERRORS_HPP
#define SPDC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spdc {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file (bad JSON, missing field, unknown schema version).
class ParseError : public Error {
public:
  explicit ParseError(const std::string& msg) : Error("parse error: " + msg) {}
};

// Structurally valid input that violates a model invariant.
class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& msg)
      : Error("validation error: " + msg) {}
};

// Evaluation requested outside a model's validity range. The message names
// the violated bound; there is no silent extrapolation anywhere.
class OutOfRangeError : public Error {
public:
  explicit OutOfRangeError(const std::string& msg)
      : Error("out of range: " + msg) {}
};

// Root finding / curve construction failure (no root, degenerate continuum,
// solution count change across a scan, ...).
class SolveError : public Error {
public:
  explicit SolveError(const std::string& msg) : Error("solve error: " + msg) {}
};

}  // namespace spdc

#endif
