#pragma once

#include <stdexcept>
#include <string>

namespace ozawa {

enum class ErrorKind {
  ResourceLimit,
  Parameter,
  NotQuasiGeodesic,
  QuasiGeodesicViolation,
  DegenerateFamily,
  CoverViolation,
  WindowTooSmall,
  HomomorphismViolation,
  LemmaViolation,
  PlanInfeasible,
  EmbeddingInvalid,
  PropernessViolation,
  Numerical,
  Schema,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so front-ends can map
/// it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ozawa
