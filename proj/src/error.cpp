#include "mbill/error.hpp"

namespace mbill {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::NotUnit: return "NotUnit";
    case ErrorCode::NonConvexArc: return "NonConvexArc";
    case ErrorCode::GeometryOverlap: return "GeometryOverlap";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::FlatPoint: return "FlatPoint";
    case ErrorCode::OutOfChart: return "OutOfChart";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::TangencyAtCorner: return "TangencyAtCorner";
    case ErrorCode::CornerHit: return "CornerHit";
    case ErrorCode::TangentialHit: return "TangentialHit";
    case ErrorCode::CoincidentPoints: return "CoincidentPoints";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::GrazingAngle: return "GrazingAngle";
    case ErrorCode::SingularImplicit: return "SingularImplicit";
    case ErrorCode::SecondOrderNonzero: return "SecondOrderNonzero";
    case ErrorCode::NotElliptic: return "NotElliptic";
    case ErrorCode::ResonantOrbit: return "ResonantOrbit";
    case ErrorCode::ScaleDegenerate: return "ScaleDegenerate";
    case ErrorCode::ResonantOrParabolic: return "ResonantOrParabolic";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace mbill
