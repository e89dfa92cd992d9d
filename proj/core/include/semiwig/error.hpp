#pragma once

#include <stdexcept>
#include <string>

namespace semiwig {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error { using Error::Error; };
class InvalidState : public Error { using Error::Error; };
class ResolutionError : public Error { using Error::Error; };
class InconsistencyError : public Error { using Error::Error; };
class MetadataError : public Error { using Error::Error; };
class HypothesisViolation : public Error { using Error::Error; };
class InvalidSweep : public Error { using Error::Error; };
class InvalidDecomposition : public Error { using Error::Error; };

/// Boundary mass above the decay threshold, raised only under BoundaryPolicy::error.
class BoundaryDecayError : public Error { using Error::Error; };

/// Time step too coarse for the phases it must resolve.
class StabilityError : public Error {
 public:
  StabilityError(const std::string& what, double suggested_dt)
      : Error(what), suggested_dt_(suggested_dt) {}
  double suggested_dt() const noexcept { return suggested_dt_; }

 private:
  double suggested_dt_;
};

/// Density dropped below the vacuum floor.
class VacuumError : public Error {
 public:
  VacuumError(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t column)
      : Error(what + " at column " + std::to_string(column)), column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

}  // namespace semiwig
