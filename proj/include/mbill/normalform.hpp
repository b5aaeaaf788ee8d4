#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mbill/dynamics.hpp"
#include "mbill/geometry.hpp"
#include "mbill/map_jet.hpp"

namespace mbill {

using cplx = std::complex<double>;

enum class LinearClass { Elliptic, Parabolic, Hyperbolic };

std::string_view to_string(LinearClass c) noexcept;

struct StabilityClass {
  LinearClass kind = LinearClass::Elliptic;
  double trace = 0.0;
  /// Eigenvalue with nonnegative imaginary part (elliptic) or the larger real one.
  cplx lambda;
};

/// Throws InvalidArgument when det M is off 1 by more than 1e-6.
StabilityClass classify(const Mat2& M);

enum class NonresonanceCondition { Generic, A, B };

std::string_view to_string(NonresonanceCondition c) noexcept;

/// Vertex data for the context-specific checks.
struct ResonanceContext {
  enum class Kind { Generic, Symmetric, Asymmetric };
  Kind kind = Kind::Generic;
  double a = 1.0;
  double L = 0.0;
  double R0 = 0.0;
  double R1 = 0.0;

  static ResonanceContext symmetric(double a, double L, double R) { return {Kind::Symmetric, a, L, R, R}; }
  static ResonanceContext asymmetric(double a, double L, double R0, double R1) {
    return {Kind::Asymmetric, a, L, R0, R1};
  }
};

struct NonresonanceResult {
  bool ok = true;
  NonresonanceCondition which = NonresonanceCondition::Generic;
  std::string detail;
};

/// Generic part: trace not in {0, -2, 2} within 1e-9.  Symmetric context adds
/// L != aR, asymmetric adds (L - aR0)(L - aR1) != 0 (relative 1e-9).
NonresonanceResult check_nonresonance(const Mat2& M, const ResonanceContext& context = {});

/// Symplectic chart in which the linear part is a rotation.
///   Standard  (s, u) = (p x, q x + y / p)
///   Mirror    y -> -y; orientation reversing, the rotation angle flips sign
///   Swapped   (x, y) -> (y, -x); the roles of p and 1/p exchange
enum class ChartVariant { Standard, Mirror, Swapped };

struct TwistOptions {
  ChartVariant chart = ChartVariant::Standard;
  bool require_nonresonant = true;
};

struct TwistResult {
  double tau1 = 0.0;
  double theta = 0.0;
  double eta = 1.0;  // p
  double q = 0.0;
  cplx lambda;
  cplx c30, c21, c12, c03;
  double residual_re_c21 = 0.0;
  double residual_c12 = 0.0;
  /// Cubic Taylor coefficients of the map in rotation coordinates, index [j][k], j + k = 3.
  double a[4][4] = {};
  double b[4][4] = {};
};

TwistResult twist_from_jet(const MapJet& jet, const TwistOptions& options = {});

/// c_jk from the cubic coefficients a_jk, b_jk and the eigenvalue.
std::array<cplx, 4> cubic_c_coefficients(const double (&a)[4][4], const double (&b)[4][4], cplx lambda);

/// One-step vertex twist for F = a|v|_2 + (1-a)|v|_4.
double twist_symmetric_closed(double a, double L, double R, double Rpp);
/// The same coefficient in the (a, b) form; equals the above when b = 1 - a.
double twist_symmetric_closed_ab(double a, double b, double L, double R, double Rpp);

/// Lemon of unit radius, R'' = 0.
double twist_lemon_closed(double a, double L);
/// Minor-axis orbit of x^2 + y^2 / delta^2 = 1.
double twist_ellipse_closed(double a, double delta);

struct AsymmetricClosed {
  double value = 0.0;
  /// The Delta numerator carries a repeated line; the value is not an oracle.
  bool typo_suspected = true;
};

/// Two-step vertex twist with the numerator evaluated literally; disagrees with the jet pipeline.
AsymmetricClosed twist_asymmetric_closed(double a, double L, double R0, double R1, double R0pp, double R1pp);

/// Two-step Euclidean twist (a = 1).
double twist_asymmetric_euclidean(double L, double R0, double R1, double R0pp, double R1pp);

enum class MoserVerdict { Yes, UnknownResonant, UnknownZeroTwist, NoHyperbolic, NoParabolic };

std::string_view to_string(MoserVerdict v) noexcept;

struct StabilityReport {
  std::string table_kind;
  double a = 0.0, b = 0.0;
  int k = 2;
  VertexData vertex;
  bool symmetric = true;
  int steps = 1;
  StabilityClass cls;
  std::optional<NonresonanceResult> nonresonance;  // elliptic only
  std::optional<TwistResult> twist;
  std::optional<double> tau1_closed;
  std::optional<double> tau1_closed_asymmetric;  // typo suspected, informational
  std::optional<double> tau1_euclidean;  // a = 1 two-step formula
  std::string twist_error;
  MoserVerdict verdict = MoserVerdict::NoHyperbolic;

  std::optional<double> tau1_numeric() const {
    return twist ? std::optional<double>(twist->tau1) : std::nullopt;
  }
};

/// |tau1| at or below this counts as zero twist.
inline constexpr double kZeroTwistTolerance = 1e-7;

/// Stability of the axis 2-orbit.  Symmetric tables use the one-step map,
/// others the two-step map.
StabilityReport report(const Billiard& billiard);

/// Flat key=value record, one pair per line in insertion order.
std::vector<std::pair<std::string, std::string>> to_key_values(const StabilityReport& r);
std::string serialize(const StabilityReport& r);

}  // namespace mbill
