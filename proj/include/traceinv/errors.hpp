#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace traceinv {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Cholesky pivot fell below the positive-definiteness threshold, or a
/// Lanczos Ritz value came out non-positive.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidShape : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The interpolation system could not be solved (coincident nodes).
class SingularSystem : public Error {
 public:
  using Error::Error;
};

/// An interpolant evaluated to a non-positive value for 1/tau.
class NonPositiveResult : public Error {
 public:
  using Error::Error;
};

/// A rational interpolant has a real pole inside the evaluation interval.
class PoleInDomain : public Error {
 public:
  PoleInDomain(const std::string& what, std::vector<double> roots)
      : Error(what), roots_(std::move(roots)) {}

  const std::vector<double>& roots() const noexcept { return roots_; }

 private:
  std::vector<double> roots_;
};

/// Malformed input file; the message carries the offending line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& msg)
      : Error(path + ":" + std::to_string(line) + ": " + msg), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace traceinv
