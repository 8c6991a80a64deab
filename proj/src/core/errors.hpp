#pragma once

#include <stdexcept>
#include <string>

namespace lsn {

/// Error categories shared by the core library and the C API status codes.
enum class ErrorCode : int {
  kConfig = 2,
  kSolver = 3,
  kFit = 4,
  kDomain = 5,
  kConstantPhi = 6,
  kHypothesis = 7,
  kSchema = 8,
  kIo = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCode::kDomain, what) {}
};

/// Raised whenever an operation needs an invertible Phi but alpha == beta.
class ConstantPhiError : public Error {
 public:
  explicit ConstantPhiError(const std::string& what)
      : Error(ErrorCode::kConstantPhi,
              what + " (constant-Phi regime: use the characteristics oracle)") {}
};

class HypothesisError : public Error {
 public:
  explicit HypothesisError(const std::string& what) : Error(ErrorCode::kHypothesis, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCode::kConfig, what) {}
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what) : Error(ErrorCode::kSchema, what) {}
};

class FitError : public Error {
 public:
  explicit FitError(const std::string& what) : Error(ErrorCode::kFit, what) {}
};

class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what) : Error(ErrorCode::kSolver, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::kIo, what) {}
};

}  // namespace lsn
