#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace shiftkrylov {

// Base of every error raised by the library. Callers that only care about
// "did it fail" catch this; the CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class UnsupportedFormat : public Error {
 public:
  using Error::Error;
};

class InvalidGrid : public Error {
 public:
  using Error::Error;
};

class InvalidDimensions : public Error {
 public:
  using Error::Error;
};

class DuplicateNodes : public Error {
 public:
  using Error::Error;
};

class ZeroStartVector : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IllConditionedEigenbasis : public Error {
 public:
  using Error::Error;
};

/// Raised by the Givens solver when a post-rotation diagonal entry falls
/// below eps * ||H||_F.
class SingularReducedSystem : public Error {
 public:
  SingularReducedSystem(const std::string& what, std::size_t column)
      : Error(what), column_(column) {}

  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

/// Every active shift was skipped (singular reduced system) for three
/// consecutive cycles.
class AllShiftsStalled : public Error {
 public:
  using Error::Error;
};

/// A matrix-function evaluation could not converge every node.
class NotConverged : public Error {
 public:
  NotConverged(const std::string& what, std::vector<std::size_t> nodes)
      : Error(what), nodes_(std::move(nodes)) {}

  const std::vector<std::size_t>& nodes() const noexcept { return nodes_; }

 private:
  std::vector<std::size_t> nodes_;
};

}  // namespace shiftkrylov
