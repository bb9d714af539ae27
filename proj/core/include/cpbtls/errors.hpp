#pragma once

#include <stdexcept>
#include <string>

namespace cpbtls {

// Invalid model parameters (bad charging energy, wrong TLS count, ...).
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Jacobi iteration hit its sweep cap. Carries the remaining off-diagonal norm.
class EigenSolverError : public std::runtime_error {
 public:
  EigenSolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Physics formula evaluated outside its domain of validity.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Config or data file problem. line() is 1-based, 0 when no single line applies.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line = 0, std::string key = {})
      : std::runtime_error(what), line_(line), key_(std::move(key)) {}
  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  int line_;
  std::string key_;
};

}  // namespace cpbtls
