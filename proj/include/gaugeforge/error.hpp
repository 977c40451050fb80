#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gaugeforge {

/// Base class of every domain error raised by the library. `kind()` is a
/// stable machine-readable tag used by the CLI error block.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& m) : Error("argument", m) {}
};

class DegeneracyError : public Error {
 public:
  explicit DegeneracyError(const std::string& m) : Error("degeneracy", m) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& m) : Error("parse", m) {}
};

class IntegrandValidityError : public Error {
 public:
  explicit IntegrandValidityError(const std::string& m)
      : Error("integrand-validity", m) {}
};

class ConfigurationError : public Error {
 public:
  explicit ConfigurationError(const std::string& m)
      : Error("configuration", m) {}
};

class FeasibilityError : public Error {
 public:
  explicit FeasibilityError(const std::string& m) : Error("feasibility", m) {}
};

class DecompositionError : public Error {
 public:
  DecompositionError(const std::string& m, double residual)
      : Error("decomposition", m), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class ReductionUnsupportedError : public Error {
 public:
  explicit ReductionUnsupportedError(const std::string& m)
      : Error("reduction-unsupported", m) {}
};

class TestPairError : public Error {
 public:
  explicit TestPairError(const std::string& m) : Error("test-pair", m) {}
};

class InternalConsistencyError : public Error {
 public:
  explicit InternalConsistencyError(const std::string& m)
      : Error("internal-consistency", m) {}
};

/// Raised when the estimate ledger does not close. Carries every
/// intermediate value so the caller can print them.
class CertificateFailure : public Error {
 public:
  CertificateFailure(const std::string& m,
                     std::vector<std::pair<std::string, double>> values)
      : Error("certificate-failure", m), values_(std::move(values)) {}
  const std::vector<std::pair<std::string, double>>& values() const noexcept {
    return values_;
  }

 private:
  std::vector<std::pair<std::string, double>> values_;
};

}  // namespace gaugeforge
