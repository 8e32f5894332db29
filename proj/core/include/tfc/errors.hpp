// Distributed under the MIT License.
// See LICENSE for details.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tfc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected,
             const std::string& message);
  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept {
    return expected_;
  }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

/// A function name that the expression language does not know.
class UnknownIdentifier : public Error {
 public:
  UnknownIdentifier(std::size_t offset, const std::string& name);
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Evaluation of an expression that references an unbound variable.
class UnboundVariable : public Error {
 public:
  explicit UnboundVariable(const std::string& name);
};

/// Evaluation outside the real domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Derivative requested where the function has none (abs at 0).
class NonDifferentiable : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Support matrix that cannot be inverted.
class SingularSupport : public Error {
 public:
  SingularSupport(double condition, const std::string& message);
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

/// Integral constraints whose integration variables refer to one another.
class CyclicIntegralDependency : public Error {
 public:
  using Error::Error;
};

/// Rank deficient least-squares system for a method that cannot handle it.
class RankDeficient : public Error {
 public:
  using Error::Error;
};

/// Residual that is not affine in the dependent variables.
class NonAffineResidual : public Error {
 public:
  using Error::Error;
};

/// Invalid problem or configuration.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& message);
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace tfc
