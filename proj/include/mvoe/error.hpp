#ifndef MVOE_ERROR_HPP
#define MVOE_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mvoe {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NotSymmetric,
  NotPositiveDefinite,
  NoConvergence,
  MaxIterationsExceeded,
  SingularMap,
  UnsupportedDimension,
  Parse,
  Internal,
};

/// Base of every exception thrown by the library. `code()` lets callers
/// (the CLI in particular) branch on the failure class without RTTI chains.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorCode::InvalidArgument, what) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what)
      : Error(ErrorCode::DimensionMismatch, what) {}
};

class NotSymmetric : public Error {
 public:
  explicit NotSymmetric(const std::string& what) : Error(ErrorCode::NotSymmetric, what) {}
};

class NotPositiveDefinite : public Error {
 public:
  explicit NotPositiveDefinite(std::size_t pivot)
      : Error(ErrorCode::NotPositiveDefinite,
              "matrix is not positive definite (failing pivot " + std::to_string(pivot) + ")"),
        pivot_(pivot) {}

  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

class NoConvergence : public Error {
 public:
  explicit NoConvergence(const std::string& what) : Error(ErrorCode::NoConvergence, what) {}
};

class MaxIterationsExceeded : public Error {
 public:
  MaxIterationsExceeded(int iterations, double last_iterate)
      : Error(ErrorCode::MaxIterationsExceeded,
              "no convergence after " + std::to_string(iterations) +
                  " iterations (last iterate " + std::to_string(last_iterate) + ")"),
        last_iterate_(last_iterate) {}

  double last_iterate() const noexcept { return last_iterate_; }

 private:
  double last_iterate_;
};

class SingularMap : public Error {
 public:
  explicit SingularMap(const std::string& what) : Error(ErrorCode::SingularMap, what) {}
};

class UnsupportedDimension : public Error {
 public:
  explicit UnsupportedDimension(std::size_t dim)
      : Error(ErrorCode::UnsupportedDimension,
              "unsupported dimension " + std::to_string(dim)) {}
};

/// Malformed or schema-violating input file.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorCode::Parse, what) {}
};

class InternalError : public Error {
 public:
  explicit InternalError(const std::string& what) : Error(ErrorCode::Internal, what) {}
};

}  // namespace mvoe

#endif  // MVOE_ERROR_HPP
