#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace biot {

//! Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidMeshError : public Error {
 public:
  using Error::Error;
};

class NestingError : public Error {
 public:
  using Error::Error;
};

class InvalidMaterialError : public Error {
 public:
  using Error::Error;
};

//! Raised when a coarse cell violates eta_p <= 2 K_b_p.
class DecouplingBoundError : public Error {
 public:
  DecouplingBoundError(std::size_t coarse_cell, const std::string& what)
      : Error(what), cell_(coarse_cell) {}
  std::size_t cell() const { return cell_; }

 private:
  std::size_t cell_;
};

class SolverStallError : public Error {
 public:
  SolverStallError(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

class SingularSystemError : public Error {
 public:
  using Error::Error;
};

class StepError : public Error {
 public:
  using Error::Error;
};

class InconsistentCouplingError : public Error {
 public:
  using Error::Error;
};

//! Coupling loop hit its iteration cap; carries the weighted norm history.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> history)
      : Error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace biot
