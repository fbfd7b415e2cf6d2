#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace superhedge {

enum class ErrorKind {
  EmptySample,
  DomainError,
  UnsupportedDimension,
  LevelError,
  ParameterError,
  ShapeError,
  SolverStall,
  ArbitrageDetected,
  NAViolation,
  QuoteArbitrage,
  ConfigError,
  SizeError,
  StationarityError,
  ParseError,
  EvalError,
  LipschitzRequired,
  Unbounded,
  DataError,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library. `kind` drives CLI exit codes;
/// `witness` carries a separating strategy H for arbitrage-type errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::vector<double> witness = {})
      : std::runtime_error(what), kind_(kind), witness_(std::move(witness)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::vector<double>& witness() const noexcept { return witness_; }

 private:
  ErrorKind kind_;
  std::vector<double> witness_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what,
                              std::vector<double> witness = {}) {
  throw Error(kind, what, std::move(witness));
}

}  // namespace superhedge
