#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vacflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid or field shapes that do not fit together.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// Spectrum handed to an inverse transform is not Hermitian.
class SymmetryViolation : public Error {
 public:
  SymmetryViolation(const std::string& what, double defect)
      : Error(what), defect_(defect) {}
  double defect() const { return defect_; }

 private:
  double defect_;
};

/// Time step exceeds the stability limit; carries the admissible step.
class CflViolation : public Error {
 public:
  CflViolation(const std::string& what, double admissible_dt)
      : Error(what), admissible_dt_(admissible_dt) {}
  double admissible_dt() const { return admissible_dt_; }

 private:
  double admissible_dt_;
};

/// Krylov solver failed to reach its tolerance.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::vector<double> residual_history)
      : Error(what), history_(std::move(residual_history)) {}
  const std::vector<double>& residual_history() const { return history_; }

 private:
  std::vector<double> history_;
};

/// Invalid physical or numerical parameter.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Initial-data specification cannot be realised.
class SpecError : public Error {
 public:
  using Error::Error;
};

/// Run configuration that does not validate.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unreadable checkpoint / config file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace vacflow
