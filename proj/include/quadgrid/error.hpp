#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace quadgrid {

/// Failure categories raised by the library. Numerical non-convergence is not
/// an error; solvers report it through SolveReport.
enum class ErrorKind {
  InvalidArgument,
  DegeneratePolyline,
  InvalidIac,
  MalformedSiac,
  NotGrowing,
  NotSpanning,
  ExtensionEscapesDomain,
  InvalidQiac,
  NotAssociated,
  NonConformable,
  NoIntersection,
  MultipleIntersections,
  CrossingCurves,
  DegenerateSpacing,
  LineConflict,
  VertexCollision,
  OrderViolation,
  NoFreeNode,
  InconsistentLength,
  SyntaxError,
  ValidationError,
  IoError,
};

constexpr std::string_view to_string(ErrorKind k) noexcept {
  switch (k) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DegeneratePolyline: return "DegeneratePolyline";
    case ErrorKind::InvalidIac: return "InvalidIac";
    case ErrorKind::MalformedSiac: return "MalformedSiac";
    case ErrorKind::NotGrowing: return "NotGrowing";
    case ErrorKind::NotSpanning: return "NotSpanning";
    case ErrorKind::ExtensionEscapesDomain: return "ExtensionEscapesDomain";
    case ErrorKind::InvalidQiac: return "InvalidQiac";
    case ErrorKind::NotAssociated: return "NotAssociated";
    case ErrorKind::NonConformable: return "NonConformable";
    case ErrorKind::NoIntersection: return "NoIntersection";
    case ErrorKind::MultipleIntersections: return "MultipleIntersections";
    case ErrorKind::CrossingCurves: return "CrossingCurves";
    case ErrorKind::DegenerateSpacing: return "DegenerateSpacing";
    case ErrorKind::LineConflict: return "LineConflict";
    case ErrorKind::VertexCollision: return "VertexCollision";
    case ErrorKind::OrderViolation: return "OrderViolation";
    case ErrorKind::NoFreeNode: return "NoFreeNode";
    case ErrorKind::InconsistentLength: return "InconsistentLength";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace quadgrid
