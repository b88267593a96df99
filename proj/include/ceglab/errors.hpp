#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ceglab {

// Base of every error the library throws. The CLI maps `ValidationError`
// and `DomainError` to exit status 1, `IoError` to exit status 2.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input (bad rows, bad config fields, bad flags).
class ValidationError : public Error {
public:
  using Error::Error;
};

// Run-CSV problem tied to a physical line of the input (1-based).
class ParseError : public ValidationError {
public:
  ParseError(std::size_t line, const std::string &what)
      : ValidationError("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

// A mathematically valid request that has no answer (fit impossible, query
// outside a curve's domain, root not bracketed).
class DomainError : public Error {
public:
  using Error::Error;
};

// The requested loss lies at or below the irreducible loss: reaching it would
// take infinite compute.
class UnreachableError : public DomainError {
public:
  explicit UnreachableError(const std::string &what) : DomainError(what) {}
};

class IoError : public Error {
public:
  using Error::Error;
};

} // namespace ceglab
