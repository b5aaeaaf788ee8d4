#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "mbill/error.hpp"
#include "mbill/geometry.hpp"

using namespace mbill;

namespace {

std::shared_ptr<const Norm> mixed(double a) { return std::make_shared<MixedNorm>(a, 1.0 - a); }

}  // namespace

TEST(Tables, LemonVertexData) {
  const Billiard b(make_lemon(1.2), mixed(0.7));
  const VertexData v = vertex_data(b);
  EXPECT_NEAR(v.L, 1.2, 1e-15);
  EXPECT_NEAR(v.R0, 1.0, 1e-12);
  EXPECT_NEAR(v.R1, 1.0, 1e-12);
  EXPECT_NEAR(v.R0pp, 0.0, 1e-6);
  EXPECT_NEAR(v.R1pp, 0.0, 1e-6);
}

TEST(Tables, EllipseVertexData) {
  for (double d : {0.3, 0.5, 0.7, 0.9}) {
    const Billiard b(make_ellipse(d), mixed(0.8));
    const VertexData v = vertex_data(b);
    EXPECT_NEAR(v.L, 2 * d, 1e-15);
    EXPECT_NEAR(v.R0, 1 / d, 1e-12);
    EXPECT_NEAR(v.R1, 1 / d, 1e-12);
    EXPECT_NEAR(v.R0pp, 3 * (d * d - 1) / d, 1e-6);
    EXPECT_NEAR(v.R1pp, 3 * (d * d - 1) / d, 1e-6);
  }
}

TEST(Tables, PolynomialVertexData) {
  const Billiard b(make_polynomial_table({1.0}, {1.0}, 1.0), mixed(0.5));
  EXPECT_DOUBLE_EQ(vertex_data(b).R0, 0.5);
  const Billiard asym(make_polynomial_table({0.6}, {0.4}, 1.0), mixed(0.5));
  const VertexData v = vertex_data(asym);
  EXPECT_NEAR(v.R0, 1 / 1.2, 1e-15);
  EXPECT_NEAR(v.R0pp, 3.6, 1e-15);
  EXPECT_NEAR(v.R1, 1.25, 1e-15);
  EXPECT_NEAR(v.R1pp, 2.4, 1e-15);
  const VertexData n = vertex_data_numeric(asym);
  EXPECT_NEAR(n.R0, v.R0, 1e-8 * v.R0);
  EXPECT_NEAR(n.R1pp, v.R1pp, 1e-5 * (1 + v.R1pp));
}

TEST(Tables, ConstructionErrors) {
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code_of([] { make_polynomial_table({1.0, -2.0}, {1.0}, 1.0, 0.5); }), ErrorCode::NonConvexArc);
  EXPECT_EQ(code_of([] { make_polynomial_table({1.0}, {1.0}, 1.0, 0.8); }), ErrorCode::GeometryOverlap);
  EXPECT_EQ(code_of([] { make_lemon(2.5); }), ErrorCode::GeometryOverlap);
  EXPECT_EQ(code_of([] { make_polynomial_table({0.0}, {1.0}, 1.0); }), ErrorCode::NonConvexArc);
}

TEST(Tables, DefaultEpsilon) {
  // alpha = beta = t^2, L = 1: arcs meet at t = sqrt(1/2).
  EXPECT_NEAR(default_epsilon({1.0}, {1.0}, 1.0), 0.9 * std::sqrt(0.5), 1e-12);
  // alpha'' = 2 - 24 t^2 vanishes at t = 1/sqrt(12).
  EXPECT_NEAR(default_epsilon({1.0, -2.0}, {1.0}, 10.0), 0.9 / std::sqrt(12.0), 1e-12);
}

TEST(Tables, BoundaryIsClosedAndCounterclockwise) {
  for (const Table& t : {make_lemon(0.8), make_lemon(0.5, 1.0, 2.0), make_ellipse(0.6), make_circle(1.0),
                         make_polynomial_table({0.6, 0.1}, {0.4}, 1.0)}) {
    double area = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const Piece& p = t.pieces[i];
      const Piece& q = t.pieces[(i + 1) % t.size()];
      const Vec2 gap = p.point(p.tau_hi) - q.point(q.tau_lo);
      EXPECT_LT(euclid_norm(gap), 1e-12) << t.kind << " junction " << i;
      for (int k = 0; k < 200; ++k) {
        const double t0 = p.tau_lo + (p.tau_hi - p.tau_lo) * k / 200.0;
        const double t1 = p.tau_lo + (p.tau_hi - p.tau_lo) * (k + 1) / 200.0;
        area += 0.5 * cross(p.point(t0), p.point(t1));
      }
    }
    EXPECT_GT(area, 0.0) << t.kind;
  }
}

TEST(Charts, EuclideanCircleIsAngle) {
  const Billiard b(make_circle(1.0), mixed(1.0));
  const ArcChart& c = b.chart(0);
  for (double t : {-1.2, -0.3, 0.0, 0.4, 1.5}) EXPECT_NEAR(c.s_of_tau(t), t, 1e-14);
}

TEST(Charts, UnitSpeedAtPolynomialVertex) {
  const Billiard b(make_polynomial_table({0.7, 0.2}, {0.5}, 1.0), mixed(0.35));
  EXPECT_NEAR(b.chart(0).speed(0.0), 1.0, 1e-15);
  EXPECT_NEAR(b.chart(2).speed(0.0), 1.0, 1e-15);
}

TEST(Charts, RoundTripAndUnitTangent) {
  std::mt19937_64 rng(4);
  for (const Table& t : {make_lemon(1.1), make_ellipse(0.45), make_polynomial_table({0.9, -0.2}, {0.6, 0.3}, 1.3)}) {
    for (double a : {0.3, 0.8, 1.0}) {
      const Billiard b(t, mixed(a));
      for (int i = 0; i < static_cast<int>(t.size()); ++i) {
        const Piece& p = b.piece(i);
        const ArcChart& c = b.chart(i);
        std::uniform_real_distribution<double> u(p.tau_lo, p.tau_hi);
        for (int k = 0; k < 100; ++k) {
          const double tau = u(rng);
          EXPECT_NEAR(c.tau_of_s(c.s_of_tau(tau)), tau, 1e-10);
          const double s = c.s_lo() + (c.s_hi() - c.s_lo()) * (k + 0.5) / 100.0;
          EXPECT_NEAR(b.norm().value(boundary_point(b, i, s).tangent), 1.0, 1e-10);
        }
      }
    }
  }
}

TEST(Charts, SerialArclengthAgreesWithQuadrature) {
  const Billiard b(make_polynomial_table({0.9, -0.2}, {0.6}, 1.3), mixed(0.4));
  const ArcSeries a = arc_series(b, 0, 0.1, 4);
  const double h = 0.01;
  const ArcChart& c = b.chart(0);
  const Vec2 exact = b.piece(0).point(c.tau_of_s(0.1 + h));
  EXPECT_NEAR(a.position[0].evaluate(h, 0), exact.x, 1e-10);
  EXPECT_NEAR(a.position[1].evaluate(h, 0), exact.y, 1e-10);
  const Vec2 d1{a.tangent[0].constant_term(), a.tangent[1].constant_term()};
  EXPECT_NEAR(b.norm().value(d1), 1.0, 1e-13);
}

TEST(BoundaryPoints, LemonVertices) {
  const Billiard b(make_lemon(0.9), mixed(0.6));
  const BoundaryPoint p0 = boundary_point(b, 0, 0.0);
  EXPECT_NEAR(p0.position.x, 0.0, 1e-15);
  EXPECT_NEAR(p0.position.y, 0.0, 1e-15);
  EXPECT_NEAR(p0.tangent.x, 0.0, 1e-15);
  EXPECT_NEAR(p0.tangent.y, -1.0, 1e-15);
  EXPECT_FALSE(p0.is_corner);
  const BoundaryPoint p1 = boundary_point(b, 1, 0.0);
  EXPECT_NEAR(p1.position.x, 0.9, 1e-15);
  EXPECT_NEAR(p1.position.y, 0.0, 1e-15);
  EXPECT_NEAR(p1.tangent.x, 0.0, 1e-15);
  EXPECT_NEAR(p1.tangent.y, 1.0, 1e-15);
  EXPECT_TRUE(boundary_point(b, 0, b.chart(0).s_hi()).is_corner);
  EXPECT_THROW(boundary_point(b, 0, b.chart(0).s_hi() + 0.1), Error);
}

TEST(Curvature, CircleIsConstant) {
  const Billiard b(make_circle(1.0), mixed(0.6));
  for (double s : {-0.8, 0.0, 0.5}) {
    const CurvatureData c = euclid_curvature(b, 0, s);
    EXPECT_NEAR(c.R, 1.0, 1e-12);
    EXPECT_NEAR(c.dR, 0.0, 1e-8);
    EXPECT_NEAR(c.d2R, 0.0, 1e-6);
  }
}

TEST(Curvature, SegmentsAreFlat) {
  const Billiard b(make_polynomial_table({1.0}, {1.0}, 2.0), mixed(0.6));
  try {
    euclid_curvature(b, 1, 0.5 * b.chart(1).s_hi());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FlatPoint);
  }
}

TEST(Curvature, PolynomialVertexClosedForms) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> a2(0.2, 2.0), a4(-0.5, 0.5);
  for (double a : {0.3, 0.5, 0.8, 1.0}) {
    for (int i = 0; i < 10; ++i) {
      const double al2 = a2(rng), al4 = a4(rng);
      const Billiard b(make_polynomial_table({al2, al4}, {al2, al4}, 3.0), mixed(a));
      const CurvatureData c = euclid_curvature(b, 0, 0.0);
      const double R = 1 / (2 * al2);
      const double Rpp = 6 * al2 - 6 * al4 / (al2 * al2);
      EXPECT_NEAR(c.R, R, 1e-8 * R);
      EXPECT_NEAR(c.d2R, Rpp, 1e-5 * (1 + std::abs(Rpp)));
      EXPECT_NEAR(c.dR, 0.0, 1e-9);
      const double s = 0.3 * b.chart(0).s_hi();
      EXPECT_NEAR(euclid_curvature(b, 0, s).R, euclid_curvature(b, 0, -s).R, 1e-9);
    }
  }
}

TEST(Curvature, MinkowskiCurvature) {
  const Billiard e(make_lemon(1.0), mixed(1.0));
  const MinkowskiCurvature m = minkowski_curvature(e, 0, 0.3);
  EXPECT_NEAR(m.kappa_m, 1.0, 1e-12);
  const ArcFrame f = arc_frame(e, 0, 0.3);
  EXPECT_NEAR(m.normal.x, -f.d1.y, 1e-12);
  EXPECT_NEAR(m.normal.y, f.d1.x, 1e-12);

  const Billiard c(make_circle(1.0), mixed(0.5));
  const double s = c.chart(0).s_of_tau(std::numbers::pi / 4);
  EXPECT_NEAR(minkowski_curvature(c, 0, s).kappa_m, 1.28233628399848395, 1e-12);

  for (double a : {0.3, 0.7}) {
    const Billiard b(make_polynomial_table({0.8, 0.3}, {0.5}, 1.4), mixed(a));
    for (int piece : {0, 2}) {
      for (double frac : {-0.7, -0.2, 0.0, 0.4, 0.9}) {
        const double ss = frac * (frac < 0 ? -b.chart(piece).s_lo() : b.chart(piece).s_hi());
        const MinkowskiCurvature mk = minkowski_curvature(b, piece, ss);
        const ArcFrame fr = arc_frame(b, piece, ss);
        EXPECT_LT(euclid_norm(fr.d2 - mk.kappa_m * mk.normal), 1e-7);
        // Second derivative from the chart by central differences.
        const double h = 1e-4;
        const Vec2 fd = (boundary_point(b, piece, ss + h).position - 2.0 * fr.position +
                         boundary_point(b, piece, ss - h).position) / (h * h);
        EXPECT_LT(euclid_norm(fd - fr.d2), 1e-6);
      }
    }
  }
}

TEST(Locate, FindsBoundaryPoints) {
  const Billiard b(make_circle(1.0), mixed(0.8));
  const BoundaryLocation loc = locate(b, {0.0, -1.0});
  EXPECT_EQ(loc.piece, 0);
  EXPECT_NEAR(loc.s, 0.0, 1e-7);
  const BoundaryLocation top = locate(b, {0.0, 1.0});
  EXPECT_EQ(top.piece, 1);
}
