#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mbill/jet.hpp"
#include "mbill/norms.hpp"

namespace mbill {

enum class PieceKind { EvenPolynomial, Ellipse, Segment };

/// One smooth boundary piece.
///
/// Every piece is described in a local frame where the parameter value
/// tau = 0 sits at the origin, the tangent there is (0, -1) and the interior
/// lies towards +x.  A rigid placement (rotation, then translation) carries
/// the local frame to the table.
///
///   EvenPolynomial  (alpha(tau), -tau),  alpha(t) = sum c_n t^(2n+2)
///   Ellipse         (B - B cos tau, -A sin tau), A tangential, B normal semi-axis
///   Segment         (0, -tau), tau in [0, length]
struct Piece {
  PieceKind kind = PieceKind::Segment;
  std::vector<double> coeffs;  // alpha_2, alpha_4, ...
  double A = 1.0;
  double B = 1.0;
  double tau_lo = 0.0;
  double tau_hi = 1.0;
  Vec2 origin{};
  double cos_a = 1.0;
  double sin_a = 0.0;

  /// Sets the placement rotation; quarter turns are stored exactly.
  void set_angle(double angle);

  /// local point (order 0) or its tau-derivative of the given order.
  Vec2 local_derivative(double tau, int order) const;
  Vec2 derivative(double tau, int order) const;  // table frame
  Vec2 point(double tau) const { return derivative(tau, 0); }
  /// Position in the table frame as jets in the variable carried by tau.
  std::array<Jet2, 2> point_jet(const Jet2& tau) const;

  /// Signed Euclidean curvature; positive on convex arcs.
  double curvature(double tau) const;
  bool has_vertex() const noexcept { return kind != PieceKind::Segment; }

  // Placement helpers.
  Vec2 to_table(Vec2 local) const noexcept;
  Vec2 rotate_to_table(Vec2 local) const noexcept;
};

struct ArcSpec {
  enum class Kind { Polynomial, Circle, Ellipse };
  Kind kind = Kind::Polynomial;
  std::vector<double> coeffs;  // alpha_2, alpha_4, ... (polynomial)
  double epsilon = 0.0;        // half-height; 0 selects the default
  double radius = 1.0;         // circle
  double delta = 0.5;          // ellipse with semi-axes (1, delta)

  static ArcSpec polynomial(std::vector<double> coeffs, double epsilon = 0.0);
  static ArcSpec circle(double radius);
  static ArcSpec ellipse(double delta);
};

/// Closed, strictly convex, counterclockwise boundary made of pieces.
struct Table {
  std::string kind;
  std::vector<Piece> pieces;
  /// smooth_after[i]: the junction between piece i and piece i+1 is C^1.
  std::vector<bool> smooth_after;
  /// Pieces carrying the two vertices of the axis 2-orbit (s = 0 on each).
  std::optional<std::array<int, 2>> vertex_pieces;
  double L = 0.0;
  /// Even-polynomial vertex coefficients, when the arcs carry them.
  std::optional<std::array<std::vector<double>, 2>> vertex_coeffs;

  std::size_t size() const noexcept { return pieces.size(); }
  int next(int piece) const noexcept { return (piece + 1) % static_cast<int>(pieces.size()); }
  int prev(int piece) const noexcept {
    return (piece + static_cast<int>(pieces.size()) - 1) % static_cast<int>(pieces.size());
  }
};

Table build_table(const ArcSpec& left, const ArcSpec& right, double L);

/// Lemon: arcs of circles of radius r0 (left vertex at the origin) and r1
/// (right vertex at (L, 0)), cut at their intersection.
Table make_lemon(double L, double r0 = 1.0, double r1 = 1.0);
/// x^2 + y^2 / delta^2 = 1, vertices at (0, -delta) and (0, delta).
Table make_ellipse(double delta);
Table make_circle(double radius);
/// Arcs (alpha(t), t) and (L - beta(t), -t) on [-eps, eps] joined by
/// horizontal segments.
Table make_polynomial_table(const std::vector<double>& alpha, const std::vector<double>& beta,
                            double L, double epsilon = 0.0);

/// Largest half-height keeping both arcs convex and disjoint, with a 10% margin.
double default_epsilon(const std::vector<double>& alpha, const std::vector<double>& beta, double L);

/// tau <-> F-arclength on one piece, with s(0) = 0.
class ArcChart {
 public:
  ArcChart(const Piece& piece, std::shared_ptr<const Norm> norm, int panels = 64);

  double s_of_tau(double tau) const;
  double tau_of_s(double s) const;
  double speed(double tau) const;  // F(d gamma / d tau)
  double s_lo() const noexcept { return s_lo_; }
  double s_hi() const noexcept { return s_hi_; }
  bool contains(double s, double slack = 1e-12) const noexcept {
    return s >= s_lo_ - slack && s <= s_hi_ + slack;
  }

 private:
  Piece piece_;
  std::shared_ptr<const Norm> norm_;
  std::vector<double> tau_edges_;
  std::vector<double> s_edges_;
  double s_lo_ = 0.0;
  double s_hi_ = 0.0;
  double segment_speed_ = 0.0;

  double integrate(double t0, double t1) const;
};

struct BoundaryLocation {
  int piece = 0;
  double s = 0.0;
};

/// A table together with a norm and the F-arclength charts of its pieces.
class Billiard {
 public:
  Billiard(Table table, std::shared_ptr<const Norm> norm);

  const Table& table() const noexcept { return table_; }
  const Norm& norm() const noexcept { return *norm_; }
  std::shared_ptr<const Norm> norm_ptr() const noexcept { return norm_; }
  const ArcChart& chart(int piece) const { return charts_.at(static_cast<std::size_t>(piece)); }
  const Piece& piece(int piece) const { return table_.pieces.at(static_cast<std::size_t>(piece)); }

 private:
  Table table_;
  std::shared_ptr<const Norm> norm_;
  std::vector<ArcChart> charts_;
};

struct BoundaryPoint {
  Vec2 position;
  Vec2 tangent;  // F-unit, counterclockwise
  bool is_corner = false;
};

BoundaryPoint boundary_point(const Billiard& billiard, int piece, double s);

/// F-arclength derivatives of the boundary: gamma', gamma''.
struct ArcFrame {
  double tau = 0.0;
  Vec2 position;
  Vec2 d1;
  Vec2 d2;
};
ArcFrame arc_frame(const Billiard& billiard, int piece, double s);

struct CurvatureData {
  double kappa = 0.0;
  double R = 0.0;
  double dR = 0.0;
  double d2R = 0.0;
};

/// Euclidean curvature and the F-arclength derivatives of its radius.
CurvatureData euclid_curvature(const Billiard& billiard, int piece, double s);

struct MinkowskiCurvature {
  double kappa_m = 0.0;
  Vec2 normal;
};
MinkowskiCurvature minkowski_curvature(const Billiard& billiard, int piece, double s);

struct VertexData {
  double L = 0.0;
  double R0 = 0.0;
  double R0pp = 0.0;
  double R1 = 0.0;
  double R1pp = 0.0;
};

/// Closed forms on conic and even-polynomial arcs, numerical curvature otherwise.
VertexData vertex_data(const Billiard& billiard);
VertexData vertex_data_numeric(const Billiard& billiard);

/// Position jet and its F-arclength derivative around s0, in the variable ds.
/// Position has the requested degree, the derivative one less.
struct ArcSeries {
  std::array<Jet2, 2> position;
  std::array<Jet2, 2> tangent;
};
ArcSeries arc_series(const Billiard& billiard, int piece, double s0, int degree);

/// Nearest boundary location to a point on (or very near) the boundary.
BoundaryLocation locate(const Billiard& billiard, Vec2 point);

}  // namespace mbill
