#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mbill {

enum class ErrorCode {
  InvalidArgument,
  ZeroVector,
  NotUnit,
  NonConvexArc,
  GeometryOverlap,
  QuadratureFailure,
  FlatPoint,
  OutOfChart,
  NoRoot,
  TangencyAtCorner,
  CornerHit,
  TangentialHit,
  CoincidentPoints,
  OutOfRange,
  DegenerateDenominator,
  GrazingAngle,
  SingularImplicit,
  SecondOrderNonzero,
  NotElliptic,
  ResonantOrbit,
  ScaleDegenerate,
  ResonantOrParabolic,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace mbill
