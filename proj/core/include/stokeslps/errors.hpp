// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace stokeslps {

// Error categories. The CLI maps any thrown Error to a one-line
// "error: <category>: <message>" on stderr and a nonzero exit code.
enum class ErrorCategory {
  InvalidArgument,
  OutOfDomain,
  SingularMatrix,
  ConvergenceFailure,
  UnsupportedDegree,
  Io,
  Internal,
};

inline const char* to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::InvalidArgument: return "invalid-argument";
    case ErrorCategory::OutOfDomain: return "out-of-domain";
    case ErrorCategory::SingularMatrix: return "singular-matrix";
    case ErrorCategory::ConvergenceFailure: return "convergence-failure";
    case ErrorCategory::UnsupportedDegree: return "unsupported-degree";
    case ErrorCategory::Io: return "io-error";
    case ErrorCategory::Internal: return "internal";
  }
  return "internal";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

struct InvalidArgumentError : Error {
  explicit InvalidArgumentError(const std::string& w)
      : Error(ErrorCategory::InvalidArgument, w) {}
};

struct OutOfDomainError : Error {
  explicit OutOfDomainError(const std::string& w)
      : Error(ErrorCategory::OutOfDomain, w) {}
};

struct SingularMatrixError : Error {
  explicit SingularMatrixError(const std::string& w)
      : Error(ErrorCategory::SingularMatrix, w) {}
};

struct ConvergenceError : Error {
  explicit ConvergenceError(const std::string& w)
      : Error(ErrorCategory::ConvergenceFailure, w) {}
};

struct UnsupportedDegreeError : Error {
  explicit UnsupportedDegreeError(const std::string& w)
      : Error(ErrorCategory::UnsupportedDegree, w) {}
};

struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorCategory::Io, w) {}
};

struct InternalError : Error {
  explicit InternalError(const std::string& w)
      : Error(ErrorCategory::Internal, w) {}
};

}  // namespace stokeslps
