#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mbill/error.hpp"
#include "mbill/map_jet.hpp"

using namespace mbill;

namespace {

std::shared_ptr<const Norm> mixed(double a) { return std::make_shared<MixedNorm>(a, 1.0 - a); }

// Third-order vertex partials of s1 and u1 for the mixed norm, indexed
// [s^3, s^2 u, s u^2, u^3].
struct VertexPartials {
  double s1[4];
  double u1[4];
};

VertexPartials vertex_partials(double a, double L, double R, double Rpp) {
  const double a2 = a * a, a3 = a2 * a, a4 = a3 * a, a5 = a4 * a;
  const double L2 = L * L, L3 = L2 * L, R2 = R * R, R3 = R2 * R;
  VertexPartials p{};
  p.s1[0] = (2 * a4 * L * R2 - 3 * a3 * R * (L2 - L * R + 2 * R2) - a3 * L * R3 * Rpp + a2 * (L3 + 3 * L * R2) -
             3 * a * L * R * (L - 3 * R) - 6 * L * R2) /
            (a4 * std::pow(R, 5));
  p.s1[1] = (2 * a4 * L * R2 - 2 * a3 * R * (L2 + R2) + a2 * (L3 + 2 * L * R2) - 3 * a * L * R * (L - 3 * R) -
             6 * L * R2) /
            (a4 * std::pow(R, 4));
  p.s1[2] = L * (-a3 * L * R + a2 * (L2 + R2) - 3 * a * R * (L - 3 * R) - 6 * R2) / (a4 * R3);
  p.s1[3] = L * (a2 * L2 - 3 * a * R * (L - 3 * R) - 6 * R2) / (a4 * R2);
  // Overall sign of this entry taken from the independent lemon computation
  // in LemonEuclideanSpotValues.
  p.u1[0] = -(6 * L * R2 - 8 * a5 * R3 - 12 * a3 * L * R * (L + R) + 3 * a2 * L2 * (L + 3 * R) +
             2 * a4 * R2 * (8 * L + 3 * R) - 3 * a * L * (L2 - L * R + 3 * R2) +
             a * R * (L3 - 3 * a * L2 * R + 4 * a2 * L * R2 - 2 * a3 * R3) * Rpp) /
            (a4 * std::pow(R, 6));
  p.u1[1] = -(6 * a4 * L * R2 - a3 * R * (9 * L2 + 3 * L * R + 2 * R2) + a2 * L * (3 * L2 + 6 * L * R + R2) -
              3 * a * L * (L2 - L * R + 3 * R2) + a * L * R * Rpp * (L - a * R) * (L - a * R) + 6 * L * R2) /
            (a4 * std::pow(R, 5));
  p.u1[2] = -(6 * L * R2 + 2 * a4 * L * R2 + a2 * L * (3 * L2 + 3 * L * R + 2 * R2) -
              3 * a * L * (L2 - L * R + 3 * R2) - 2 * a3 * (3 * L2 * R + R3) + a * L2 * R * (L - a * R) * Rpp) /
            (a4 * std::pow(R, 4));
  p.u1[3] = (3 * (a - 1) * L * (a2 * L * R - a * (L2 - L * R + R2) + 2 * R2) - a * L3 * R * Rpp) / (a4 * R3);
  return p;
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

void expect_matrix_near(const Mat2& a, const Mat2& b, double tol) {
  EXPECT_NEAR(a.m11, b.m11, tol * (1 + std::abs(b.m11)));
  EXPECT_NEAR(a.m12, b.m12, tol * (1 + std::abs(b.m12)));
  EXPECT_NEAR(a.m21, b.m21, tol * (1 + std::abs(b.m21)));
  EXPECT_NEAR(a.m22, b.m22, tol * (1 + std::abs(b.m22)));
}

}  // namespace

TEST(MapJet, LinearPartIsTangentMap) {
  const Billiard b(make_ellipse(0.6), mixed(0.7));
  const MapJet v = map_jet(b);
  expect_matrix_near(v.linear(), tangent_map_su(b, {0, 0.0}, {1, 0.0}), 1e-9);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> s(-0.5, 0.5), u(-0.6, 0.6);
  for (int i = 0; i < 20; ++i) {
    const PhasePointSU p{0, s(rng), u(rng)};
    const MapJet mj = step_jet(b, p);
    EXPECT_NEAR(mj.s1.constant_term(), mj.image.s, 1e-15);
    EXPECT_NEAR(mj.u1.constant_term(), mj.image.u, 1e-13);
    expect_matrix_near(mj.linear(), tangent_map_su(b, {p.piece, p.s}, {mj.image.piece, mj.image.s}), 1e-9);
  }
}

TEST(MapJet, LemonEuclideanSpotValues) {
  const Billiard lemon(make_lemon(1.0), mixed(1.0));
  const MapJet mj = map_jet(lemon);
  EXPECT_NEAR(mj.s1(0, 1), 1.0, 1e-12);  // L / a
  EXPECT_NEAR(mj.s1(0, 3), 1.0 / 6.0, 1e-10);

  // Third s-derivatives at L = 0.45 from a 50-digit ray/circle computation.
  const Billiard l45(make_lemon(0.45), mixed(1.0));
  const MapJet m45 = map_jet(l45);
  EXPECT_NEAR(6 * m45.s1(3, 0), -2.173875, 1e-9);
  EXPECT_NEAR(6 * m45.u1(3, 0), 1.55, 1e-9);
}

TEST(MapJet, VertexPartialsMatchClosedForms) {
  // (alpha_2, alpha_4) pairs give R = 1/(2 alpha_2), R'' = 6 alpha_2 - 6 alpha_4 / alpha_2^2.
  const std::vector<std::array<double, 2>> arcs = {{0.5, 0.0}, {0.7, 0.1}, {1.0, -0.2}};
  for (double a : {0.5, 0.8, 1.0}) {
    for (double L : {0.45, 0.9, 1.35}) {
      for (const auto& c : arcs) {
        const std::vector<double> alpha{c[0], c[1]};
        const Billiard b(make_polynomial_table(alpha, alpha, L), mixed(a));
        const MapJet mj = map_jet(b);
        const double R = 1 / (2 * c[0]);
        const double Rpp = 6 * c[0] - 6 * c[1] / (c[0] * c[0]);
        const VertexPartials want = vertex_partials(a, L, R, Rpp);
        for (int k = 0; k <= 3; ++k) {
          const double scale = factorial(3 - k) * factorial(k);
          const double gs = scale * mj.s1(3 - k, k), gu = scale * mj.u1(3 - k, k);
          EXPECT_NEAR(gs, want.s1[k], 1e-6 * std::max(1.0, std::abs(want.s1[k])))
              << "s1 partial " << k << " a=" << a << " L=" << L << " R=" << R;
          EXPECT_NEAR(gu, want.u1[k], 1e-6 * std::max(1.0, std::abs(want.u1[k])))
              << "u1 partial " << k << " a=" << a << " L=" << L << " R=" << R;
        }
        for (int k = 0; k <= 2; ++k) {
          EXPECT_LE(std::abs(mj.s1(2 - k, k)), 1e-8);
          EXPECT_LE(std::abs(mj.u1(2 - k, k)), 1e-8);
        }
      }
    }
  }
}

TEST(MapJet, MatchesNestedFiniteDifferences) {
  const Billiard b(make_polynomial_table({0.7, 0.2}, {0.5, -0.05}, 1.3), mixed(0.6));
  const PhasePointSU p{0, 0.12, 0.2};
  const MapJet mj = step_jet(b, p);
  auto f = [&](double ds, double du) {
    const PhasePointSU q = step_su(b, {p.piece, p.s + ds, p.u + du});
    return std::array<double, 2>{q.s, q.u};
  };
  // Central-difference weights for derivatives of order 0..3 on nodes -2..2.
  const double w[4][5] = {{0, 0, 1, 0, 0}, {0, -0.5, 0, 0.5, 0}, {0, 1, -2, 1, 0}, {-0.5, 1, 0, -1, 0.5}};
  auto fd = [&](int j, int k, double h) {
    std::array<double, 2> acc{0, 0};
    for (int i = 0; i < 5; ++i) {
      for (int m = 0; m < 5; ++m) {
        const double c = w[j][i] * w[k][m];
        if (c == 0.0) continue;
        const auto v = f((i - 2) * h, (m - 2) * h);
        acc[0] += c * v[0];
        acc[1] += c * v[1];
      }
    }
    const double scale = std::pow(h, j + k) * factorial(j) * factorial(k);
    return std::array<double, 2>{acc[0] / scale, acc[1] / scale};
  };
  for (int n = 1; n <= 3; ++n) {
    for (int k = 0; k <= n; ++k) {
      const int j = n - k;
      const auto c1 = fd(j, k, 1e-3), c2 = fd(j, k, 5e-4);
      const double es = (4 * c2[0] - c1[0]) / 3, eu = (4 * c2[1] - c1[1]) / 3;
      EXPECT_NEAR(mj.s1(j, k), es, 1e-5 * (1 + std::abs(es))) << j << "," << k;
      EXPECT_NEAR(mj.u1(j, k), eu, 1e-5 * (1 + std::abs(eu))) << j << "," << k;
    }
  }
}

TEST(MapJet, DegreeIndependence) {
  const Billiard b(make_polynomial_table({0.7, 0.1}, {0.7, 0.1}, 0.9), mixed(0.8));
  const MapJet j3 = map_jet(b, 3), j4 = map_jet(b, 4);
  EXPECT_LT(max_abs_coefficient(j4.s1.truncated(3) - j3.s1), 1e-10);
  EXPECT_LT(max_abs_coefficient(j4.u1.truncated(3) - j3.u1), 1e-10);
}

TEST(ComposeMapJets, IdentityAndSquare) {
  const Billiard b(make_lemon(0.8), mixed(0.7));
  const MapJet one = map_jet(b);
  const MapJet same = compose_map_jets(identity_jet(one.base), one);
  EXPECT_LT(max_abs_coefficient(same.s1 - one.s1), 1e-15);
  EXPECT_LT(max_abs_coefficient(same.u1 - one.u1), 1e-15);
  const MapJet same2 = compose_map_jets(one, identity_jet(one.image));
  EXPECT_LT(max_abs_coefficient(same2.s1 - one.s1), 1e-15);

  const MapJet two = two_step_jet(b);
  EXPECT_EQ(two.image.piece, one.base.piece);
  expect_matrix_near(two.linear(), one.linear() * one.linear(), 1e-9);
  // By symmetry both half-steps have the same jet.
  const MapJet back = step_jet(b, one.image);
  EXPECT_LT(max_abs_coefficient(back.s1 - one.s1), 1e-9);
  EXPECT_LT(max_abs_coefficient(back.u1 - one.u1), 1e-9);
  EXPECT_THROW(compose_map_jets(one, one), Error);
}

TEST(ComposeMapJets, AsymmetricLinearPart) {
  for (double a : {0.6, 0.9, 1.0}) {
    for (double L : {0.3, 0.7}) {
      const Billiard b(make_polynomial_table({0.6}, {0.4}, L), mixed(a));
      const VertexData vd = vertex_data(b);
      const double R0 = vd.R0, R1 = vd.R1;
      const Mat2 m = two_step_jet(b).linear();
      const double a10 = (a * R0 * (a * R1 - 2 * L) + 2 * L * (L - a * R1)) / (a * a * R0 * R1);
      const double a01 = (2 * L / a) * (L / (a * R1) - 1);
      const double b10 = 2 * (L - a * R0) * (L - a * (R0 + R1)) / (a * a * R0 * R0 * R1);
      EXPECT_NEAR(m.m11, a10, 1e-8 * (1 + std::abs(a10)));
      EXPECT_NEAR(m.m22, a10, 1e-8 * (1 + std::abs(a10)));
      EXPECT_NEAR(m.m12, a01, 1e-8 * (1 + std::abs(a01)));
      EXPECT_NEAR(m.m21, b10, 1e-8 * (1 + std::abs(b10)));
    }
  }
}
