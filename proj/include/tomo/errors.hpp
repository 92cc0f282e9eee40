#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tomo {

enum class ErrorKind {
  InvalidArgument,
  MalformedPath,
  DuplicatePath,
  BoundaryInterior,
  PathInconsistency,
  NegativeWeight,
  UnknownPath,
  NotATree,
  NonFinite,
  DimensionMismatch,
  InconsistentSystem,
  Infeasible,
  MaxIterations,
  NotSymmetric,
  SingularSystem,
  PathVanishes,
  NoEdges,
  LengthMismatch,
  TooShort,
  NotConsistent,
  NegativeGap,
  Disconnected,
  BoundaryMismatch,
  ZeroDenominator,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind.
class TomoError : public std::runtime_error {
 public:
  TomoError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::MalformedPath: return "MalformedPath";
    case ErrorKind::DuplicatePath: return "DuplicatePath";
    case ErrorKind::BoundaryInterior: return "BoundaryInterior";
    case ErrorKind::PathInconsistency: return "PathInconsistency";
    case ErrorKind::NegativeWeight: return "NegativeWeight";
    case ErrorKind::UnknownPath: return "UnknownPath";
    case ErrorKind::NotATree: return "NotATree";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InconsistentSystem: return "InconsistentSystem";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::MaxIterations: return "MaxIterations";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::PathVanishes: return "PathVanishes";
    case ErrorKind::NoEdges: return "NoEdges";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::TooShort: return "TooShort";
    case ErrorKind::NotConsistent: return "NotConsistent";
    case ErrorKind::NegativeGap: return "NegativeGap";
    case ErrorKind::Disconnected: return "Disconnected";
    case ErrorKind::BoundaryMismatch: return "BoundaryMismatch";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace tomo
