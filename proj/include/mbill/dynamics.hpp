#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mbill/error.hpp"
#include "mbill/geometry.hpp"
#include "mbill/norms.hpp"

namespace mbill {

/// Row-major 2x2 matrix.
struct Mat2 {
  double m11 = 1.0, m12 = 0.0, m21 = 0.0, m22 = 1.0;

  double det() const noexcept { return m11 * m22 - m12 * m21; }
  double trace() const noexcept { return m11 + m22; }
  Vec2 apply(Vec2 v) const noexcept { return {m11 * v.x + m12 * v.y, m21 * v.x + m22 * v.y}; }
};

inline Mat2 operator*(const Mat2& a, const Mat2& b) noexcept {
  return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
          a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
}

using TangentMatrix = Mat2;

/// A boundary point with an outgoing F-unit direction pointing into the table.
struct StatePoint {
  Vec2 position;
  Vec2 direction;
  int piece = 0;
  double s = 0.0;
  double tau = 0.0;
};

struct PhasePointSU {
  int piece = 0;
  double s = 0.0;
  double u = 0.0;
};

struct Impact {
  int piece = 0;
  double s = 0.0;
  double tau = 0.0;
  Vec2 position;
};

/// Outgoing direction for an incident F-unit direction arriving at a
/// boundary point with tangent `tangent`.  Solves
/// (grad F(v) - grad F(incident)) . tangent = 0 over inward directions v.
Vec2 reflect(const Norm& norm, Vec2 tangent, Vec2 incident);

/// The same reflection by the two-tangent-line construction on the indicatrix.
Vec2 reflect_by_construction(const Norm& norm, Vec2 tangent, Vec2 incident);

/// First boundary hit along the chord leaving `state`.
/// Throws CornerHit or TangentialHit.
Impact next_impact(const Billiard& billiard, const StatePoint& state);

StatePoint step_state(const Billiard& billiard, const StatePoint& state);

/// Same point, direction reversed through the reflection law; stepping the
/// reversed state retraces the orbit for reversible norms.
StatePoint reverse_state(const Billiard& billiard, const StatePoint& state);

struct ChordData {
  double L = 0.0;
  double u = 0.0;
  double u1 = 0.0;
};

ChordData chord_data(const Billiard& billiard, BoundaryLocation from, BoundaryLocation to);

/// Open interval of admissible u at a boundary point.
std::pair<double, double> admissible_u(const Billiard& billiard, int piece, double s);

Vec2 direction_from_su(const Billiard& billiard, const PhasePointSU& p);

/// Checks that u is increasing along the inward directions at (piece, s).
bool su_monotone(const Billiard& billiard, int piece, double s, int samples = 50);

StatePoint state_from_su(const Billiard& billiard, const PhasePointSU& p);
PhasePointSU su_from_state(const Billiard& billiard, const StatePoint& state);

PhasePointSU step_su(const Billiard& billiard, const PhasePointSU& p);

/// Derivative of (s, u) -> (s1, u1) for the chord between the two locations.
TangentMatrix tangent_map_su(const Billiard& billiard, BoundaryLocation from, BoundaryLocation to);

/// Adds delta to the top-left entry of every tangent_map_su result.  Used to
/// check that the acceptance suite notices a wrong derivative; 0 disables it.
void set_tangent_map_fault(double delta) noexcept;

/// Euclidean billiard map derivative in (s, theta) coordinates.
TangentMatrix euclid_tangent_map(double s, double theta, double s1, double theta1, double L, double kappa,
                                 double kappa1);

struct Orbit {
  std::vector<StatePoint> states;
  std::vector<PhasePointSU> points;
  std::optional<ErrorCode> terminal;
  std::string message;
};

/// n bounces from a phase point; CornerHit / TangentialHit end the orbit early.
Orbit iterate(const Billiard& billiard, const PhasePointSU& start, int n);
Orbit iterate_state(const Billiard& billiard, const StatePoint& start, int n);

}  // namespace mbill
