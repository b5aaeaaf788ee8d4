#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mbill/dynamics.hpp"
#include "mbill/error.hpp"

using namespace mbill;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const Norm> mixed(double a) { return std::make_shared<MixedNorm>(a, 1.0 - a); }

double angle_between(Vec2 a, Vec2 b) { return std::atan2(cross(a, b), dot(a, b)); }

// Random transversal phase points on a billiard, away from grazing.
class PhaseGen {
 public:
  PhaseGen(const Billiard& b, std::uint64_t seed) : b_(b), rng_(seed) {}

  PhasePointSU next() {
    std::uniform_int_distribution<int> pc(0, static_cast<int>(b_.table().size()) - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (;;) {
      const int piece = pc(rng_);
      if (!b_.piece(piece).has_vertex()) continue;
      const ArcChart& c = b_.chart(piece);
      const double s = c.s_lo() + (0.05 + 0.9 * unit(rng_)) * (c.s_hi() - c.s_lo());
      const auto [lo, hi] = admissible_u(b_, piece, s);
      const double u = lo + (0.1 + 0.8 * unit(rng_)) * (hi - lo);
      return {piece, s, u};
    }
  }

 private:
  const Billiard& b_;
  std::mt19937_64 rng_;
};

double polygon_area(const std::vector<Vec2>& p) {
  double a = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) a += cross(p[i], p[(i + 1) % p.size()]);
  return 0.5 * a;
}

}  // namespace

TEST(Reflect, EuclideanEqualAngles) {
  const MixedNorm e(1, 0);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ang(0, 2 * kPi), out(0.05, kPi - 0.05);
  for (int i = 0; i < 200; ++i) {
    const Vec2 t = unit_vector(ang(rng));
    // Incident direction pointing out of the table (to the right of t).
    const Vec2 in = rotate(t, -out(rng));
    const Vec2 v = reflect(e, t, in);
    EXPECT_NEAR(angle_between(t, v), -angle_between(t, in), 1e-10);
    EXPECT_NEAR(euclid_norm(v), 1.0, 1e-14);
  }
}

TEST(Reflect, ParallelIndicatrixTangentReverses) {
  for (double a : {0.3, 0.6, 1.0}) {
    const MixedNorm f(a, 1 - a);
    for (double th : {-2.0, -1.2, -0.4}) {
      const Vec2 in = indicatrix_radius(f, th) * unit_vector(th);
      const Covec2 g = f.gradient(in);
      // Boundary tangent along the indicatrix tangent at the incident point.
      Vec2 t{-g.y, g.x};
      if (dot(perp(t), in) > 0) t = -t;
      const Vec2 v = reflect(f, t, in);
      EXPECT_NEAR(v.x, -in.x, 1e-12);
      EXPECT_NEAR(v.y, -in.y, 1e-12);
    }
  }
}

TEST(Reflect, LemonTwoOrbit) {
  const Vec2 v = reflect(MixedNorm(0.9, 0.1), {0, -1}, {-1, 0});
  EXPECT_NEAR(v.x, 1.0, 1e-14);
  EXPECT_NEAR(v.y, 0.0, 1e-14);
}

TEST(Reflect, LawResidualAndConstructionAgree) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> ang(0, 2 * kPi), out(0.02, kPi - 0.02), wa(0.2, 1.0);
  for (int i = 0; i < 300; ++i) {
    const MixedNorm f(wa(rng), 0.0 + 1.0 - 0.5 * wa(rng), 1 + static_cast<int>(rng() % 3));
    const Vec2 t = unit_vector(ang(rng));
    const Vec2 raw = rotate(t, -out(rng));
    const Vec2 in = raw / f.value(raw);
    const Vec2 v = reflect(f, t, in);
    EXPECT_NEAR(f.value(v), 1.0, 1e-14);
    EXPECT_GT(cross(t, v), 0.0);
    EXPECT_LE(std::abs((f.gradient(v) - f.gradient(in))(t)), 1e-10);
    const Vec2 w = reflect_by_construction(f, t, in);
    EXPECT_NEAR(angle_between(v, w), 0.0, 1e-9);
  }
}

TEST(Reflect, RejectsOutgoingIncident) {
  try {
    reflect(MixedNorm(1, 0), {0, -1}, {1, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoRoot);
  }
}

TEST(Impact, Examples) {
  const Billiard lemon(make_lemon(1.0), mixed(0.9));
  const Impact h = next_impact(lemon, {{0, 0}, {1, 0}, 0, 0.0, 0.0});
  EXPECT_EQ(h.piece, 1);
  EXPECT_NEAR(h.s, 0.0, 1e-12);
  EXPECT_NEAR(h.position.x, 1.0, 1e-12);

  const Billiard circle(make_circle(1.0), mixed(0.8));
  // Piece 1 is the upper half; (-1, 0) is its end at tau = pi/2.
  const StatePoint left{{-1, 0}, {1, 0}, 1, circle.chart(1).s_hi(), 0.5 * kPi};
  const Impact c = next_impact(circle, left);
  EXPECT_NEAR(c.position.x, 1.0, 1e-12);
  EXPECT_NEAR(c.position.y, 0.0, 1e-12);

  const double delta = 0.5;
  const Billiard ell(make_ellipse(delta), mixed(0.7));
  const Impact m = next_impact(ell, {{0, -delta}, {0, 1}, 0, 0.0, 0.0});
  EXPECT_EQ(m.piece, 1);
  EXPECT_NEAR(m.position.x, 0.0, 1e-12);
  EXPECT_NEAR(m.position.y, delta, 1e-12);
}

TEST(Impact, PositionResidualOnRandomChords) {
  const Billiard b(make_polynomial_table({0.8, 0.3}, {0.5}, 1.4), mixed(0.6));
  PhaseGen gen(b, 3);
  for (int i = 0; i < 200; ++i) {
    const StatePoint st = state_from_su(b, gen.next());
    Impact h;
    try {
      h = next_impact(b, st);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::CornerHit);
      continue;
    }
    const Vec2 d = st.direction / euclid_norm(st.direction);
    EXPECT_LE(std::abs(cross(d, h.position - st.position)), 1e-11);
    EXPECT_GT(dot(d, h.position - st.position), 0.0);
  }
}

TEST(Impact, CornerIsTerminal) {
  const Billiard lemon(make_lemon(1.0), mixed(1.0));
  const Vec2 corner = lemon.piece(1).point(lemon.piece(1).tau_hi);
  const Vec2 d = corner / euclid_norm(corner);
  try {
    next_impact(lemon, {{0, 0}, d, 0, 0.0, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CornerHit);
  }
}

TEST(StepState, LemonTwoOrbitReturns) {
  const Billiard lemon(make_lemon(1.0), mixed(0.9));
  const StatePoint p{{0, 0}, {1, 0}, 0, 0.0, 0.0};
  const StatePoint q = step_state(lemon, p);
  EXPECT_NEAR(q.position.x, 1.0, 1e-12);
  EXPECT_NEAR(q.direction.x, -1.0, 1e-12);
  const StatePoint r = step_state(lemon, q);
  EXPECT_NEAR(euclid_norm(r.position - p.position), 0.0, 1e-12);
  EXPECT_NEAR(euclid_norm(r.direction - p.direction), 0.0, 1e-12);
}

TEST(StepState, EuclideanCircleKeepsAngle) {
  const Billiard c(make_circle(1.0), mixed(1.0));
  StatePoint st = state_from_su(c, {0, 0.2, -0.3});
  for (int i = 0; i < 50; ++i) {
    const StatePoint nx = step_state(c, st);
    const Vec2 t = c.piece(nx.piece).derivative(nx.tau, 1);
    EXPECT_NEAR(dot(t / euclid_norm(t), nx.direction), 0.3, 1e-10);
    st = nx;
  }
}

TEST(StepState, ReversalRetraces) {
  for (double a : {0.5, 0.8, 1.0}) {
    const Billiard b(make_ellipse(0.6), mixed(a));
    StatePoint st = state_from_su(b, {0, 0.3, 0.25});
    const StatePoint start = st;
    for (int i = 0; i < 20; ++i) st = step_state(b, st);
    StatePoint back = reverse_state(b, st);
    for (int i = 0; i < 20; ++i) back = step_state(b, back);
    const StatePoint end = reverse_state(b, back);
    EXPECT_LT(euclid_norm(end.position - start.position), 1e-7);
    EXPECT_LT(euclid_norm(end.direction - start.direction), 1e-7);
  }
}

TEST(Chord, Examples) {
  const Billiard lemon(make_lemon(1.2), mixed(0.7));
  const ChordData c = chord_data(lemon, {0, 0.0}, {1, 0.0});
  EXPECT_NEAR(c.L, 1.2, 1e-14);
  EXPECT_NEAR(c.u, 0.0, 1e-14);
  EXPECT_NEAR(c.u1, 0.0, 1e-14);

  const Billiard e(make_ellipse(0.7), mixed(1.0));
  const BoundaryLocation p{0, 0.3}, q{1, -0.4};
  const ChordData d = chord_data(e, p, q);
  const BoundaryPoint bp = boundary_point(e, 0, 0.3), bq = boundary_point(e, 1, -0.4);
  const Vec2 v = bq.position - bp.position;
  EXPECT_NEAR(d.u, -std::cos(angle_between(bp.tangent, v)), 1e-14);
  EXPECT_NEAR(d.u1, -std::cos(angle_between(bq.tangent, v)), 1e-14);

  const Billiard m(make_ellipse(0.7), mixed(0.4));
  EXPECT_NEAR(chord_data(m, p, q).L, chord_data(m, q, p).L, 1e-15);
  EXPECT_THROW(chord_data(m, p, p), Error);
}

TEST(DirectionFromSU, Examples) {
  const Billiard lemon(make_lemon(1.0), mixed(0.9));
  const Vec2 v = direction_from_su(lemon, {0, 0.0, 0.0});
  EXPECT_NEAR(v.x, 1.0, 1e-14);
  EXPECT_NEAR(v.y, 0.0, 1e-14);

  const Billiard c(make_circle(1.0), mixed(1.0));
  for (double theta : {0.3, 1.0, 2.5}) {
    const Vec2 w = direction_from_su(c, {1, 0.4, -std::cos(theta)});
    EXPECT_NEAR(angle_between(boundary_point(c, 1, 0.4).tangent, w), theta, 1e-12);
  }
  try {
    direction_from_su(c, {1, 0.4, 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfRange);
  }
}

TEST(DirectionFromSU, RoundTripWithChords) {
  for (double a : {0.3, 0.7}) {
    const Billiard b(make_polynomial_table({0.8, 0.3}, {0.5}, 1.4), mixed(a));
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> frac(0.05, 0.95);
    for (int i = 0; i < 100; ++i) {
      const BoundaryLocation p{0, b.chart(0).s_lo() + frac(rng) * (b.chart(0).s_hi() - b.chart(0).s_lo())};
      const BoundaryLocation q{2, b.chart(2).s_lo() + frac(rng) * (b.chart(2).s_hi() - b.chart(2).s_lo())};
      const ChordData cd = chord_data(b, p, q);
      EXPECT_TRUE(su_monotone(b, p.piece, p.s));
      const Vec2 v = direction_from_su(b, {p.piece, p.s, cd.u});
      const Vec2 chord = boundary_point(b, q.piece, q.s).position - boundary_point(b, p.piece, p.s).position;
      EXPECT_NEAR(angle_between(v, chord), 0.0, 1e-9);
    }
  }
}

TEST(StepSU, SymmetricFixedPoint) {
  for (const Table& t : {make_lemon(1.0), make_ellipse(0.5), make_polynomial_table({0.7, 0.1}, {0.7, 0.1}, 1.1)}) {
    const Billiard b(t, mixed(0.6));
    const auto [v0, v1] = *t.vertex_pieces;
    const PhasePointSU q = step_su(b, {v0, 0.0, 0.0});
    EXPECT_EQ(q.piece, v1);
    EXPECT_NEAR(q.s, 0.0, 1e-12);
    EXPECT_NEAR(q.u, 0.0, 1e-12);
  }
}

TEST(StepSU, EuclideanCircleRotation) {
  const Billiard c(make_circle(1.0), mixed(1.0));
  const Orbit o = iterate(c, {0, -0.8, -0.6}, 30);
  ASSERT_FALSE(o.terminal);
  // Consecutive impacts are a fixed angle apart.
  auto polar = [](Vec2 p) { return std::atan2(p.y, p.x); };
  const double step = std::remainder(polar(o.states[1].position) - polar(o.states[0].position), 2 * kPi);
  for (std::size_t i = 1; i + 1 < o.states.size(); ++i) {
    const double d = std::remainder(polar(o.states[i + 1].position) - polar(o.states[i].position), 2 * kPi);
    EXPECT_NEAR(d, step, 1e-10);
  }
}

TEST(StepSU, PreservesArea) {
  const Billiard b(make_ellipse(0.6), mixed(0.7));
  const PhasePointSU c{0, 0.2, 0.15};
  const int n = 2000;
  const double r = 0.03;
  std::vector<Vec2> pre, img;
  for (int i = 0; i < n; ++i) {
    const double t = 2 * kPi * i / n;
    const PhasePointSU p{c.piece, c.s + r * std::cos(t), c.u + 0.5 * r * std::sin(t)};
    const PhasePointSU q = step_su(b, p);
    ASSERT_EQ(q.piece, 1);
    pre.push_back({p.s, p.u});
    img.push_back({q.s, q.u});
  }
  EXPECT_NEAR(polygon_area(img), polygon_area(pre), 1e-6);
}

TEST(StepSU, GeneratingFunctionIdentities) {
  for (double a : {0.5, 1.0}) {
    const Billiard b(make_ellipse(0.7), mixed(a));
    const Orbit o = iterate(b, {0, 0.1, 0.3}, 50);
    ASSERT_FALSE(o.terminal);
    const double h = 1e-6;
    for (std::size_t i = 0; i + 1 < o.points.size(); ++i) {
      const PhasePointSU& p = o.points[i];
      const PhasePointSU& q = o.points[i + 1];
      auto L = [&](double s, double s1) { return chord_data(b, {p.piece, s}, {q.piece, s1}).L; };
      const double dLds = (L(p.s + h, q.s) - L(p.s - h, q.s)) / (2 * h);
      const double dLds1 = (L(p.s, q.s + h) - L(p.s, q.s - h)) / (2 * h);
      EXPECT_NEAR(p.u, dLds, 1e-8);
      EXPECT_NEAR(q.u, -dLds1, 1e-8);
    }
  }
}

TEST(TangentMap, VertexClosedForm) {
  for (double a : {0.3, 0.5, 0.8, 1.0}) {
    for (const Table& t : {make_lemon(0.7), make_ellipse(0.6), make_polynomial_table({0.6, 0.2}, {0.6, 0.2}, 1.2)}) {
      const Billiard b(t, mixed(a));
      const VertexData vd = vertex_data(b);
      const double L = vd.L, R = vd.R0;
      const Mat2 m = tangent_map_su(b, {(*t.vertex_pieces)[0], 0.0}, {(*t.vertex_pieces)[1], 0.0});
      const Mat2 want{L / (a * R) - 1, L / a, (L - 2 * a * R) / (a * R * R), L / (a * R) - 1};
      EXPECT_NEAR(m.m11, want.m11, 1e-8 * (1 + std::abs(want.m11)));
      EXPECT_NEAR(m.m12, want.m12, 1e-8 * (1 + std::abs(want.m12)));
      EXPECT_NEAR(m.m21, want.m21, 1e-8 * (1 + std::abs(want.m21)));
      EXPECT_NEAR(m.m22, want.m22, 1e-8 * (1 + std::abs(want.m22)));
    }
  }
  const Billiard shear(make_lemon(1.0), mixed(0.5));
  const Mat2 s = tangent_map_su(shear, {0, 0.0}, {1, 0.0});
  EXPECT_NEAR(s.m11, 1.0, 1e-12);
  EXPECT_NEAR(s.m12, 2.0, 1e-12);
  EXPECT_NEAR(s.m21, 0.0, 1e-12);
  EXPECT_NEAR(s.m22, 1.0, 1e-12);
}

TEST(TangentMap, DeterminantIsOne) {
  for (const Table& t : {make_lemon(1.0), make_ellipse(0.6), make_circle(1.0)}) {
    for (double a : {0.5, 0.8, 1.0}) {
      const Billiard b(t, mixed(a));
      PhaseGen gen(b, 17);
      int tested = 0;
      while (tested < 100) {
        const PhasePointSU p = gen.next();
        PhasePointSU q;
        try {
          q = step_su(b, p);
        } catch (const Error&) {
          continue;
        }
        const Mat2 m = tangent_map_su(b, {p.piece, p.s}, {q.piece, q.s});
        EXPECT_NEAR(m.det(), 1.0, 1e-9);
        ++tested;
      }
    }
  }
}

TEST(TangentMap, MatchesFiniteDifferences) {
  const Billiard b(make_polynomial_table({0.7, 0.2}, {0.5, -0.05}, 1.3), mixed(0.6));
  PhaseGen gen(b, 5);
  int tested = 0;
  while (tested < 40) {
    const PhasePointSU p = gen.next();
    PhasePointSU q;
    try {
      q = step_su(b, p);
    } catch (const Error&) {
      continue;
    }
    const double h = 1e-5;
    PhasePointSU sp, sm, up, um;
    try {
      sp = step_su(b, {p.piece, p.s + h, p.u});
      sm = step_su(b, {p.piece, p.s - h, p.u});
      up = step_su(b, {p.piece, p.s, p.u + h});
      um = step_su(b, {p.piece, p.s, p.u - h});
    } catch (const Error&) {
      continue;
    }
    if (sp.piece != q.piece || sm.piece != q.piece || up.piece != q.piece || um.piece != q.piece) continue;
    const Mat2 m = tangent_map_su(b, {p.piece, p.s}, {q.piece, q.s});
    const double fd[4] = {(sp.s - sm.s) / (2 * h), (up.s - um.s) / (2 * h), (sp.u - sm.u) / (2 * h),
                          (up.u - um.u) / (2 * h)};
    const double an[4] = {m.m11, m.m12, m.m21, m.m22};
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(an[k], fd[k], 1e-6 * (1 + std::abs(an[k])));
    ++tested;
  }
}

TEST(EuclidTangentMap, DiameterAndDeterminant) {
  const Mat2 m = euclid_tangent_map(0, kPi / 2, 0, kPi / 2, 2, 1, 1);
  EXPECT_DOUBLE_EQ(m.m11, 1.0);
  EXPECT_DOUBLE_EQ(m.m12, 2.0);
  EXPECT_DOUBLE_EQ(m.m21, 0.0);
  EXPECT_DOUBLE_EQ(m.m22, 1.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> th(0.1, 3.0), pos(0.1, 3.0);
  for (int i = 0; i < 100; ++i) {
    const double t0 = th(rng), t1 = th(rng);
    const Mat2 e = euclid_tangent_map(0, t0, 0, t1, pos(rng), pos(rng), pos(rng));
    EXPECT_NEAR(e.det() * std::sin(t1) / std::sin(t0), 1.0, 1e-12);
  }
  EXPECT_THROW(euclid_tangent_map(0, 1, 0, 0, 1, 1, 1), Error);
}

TEST(EuclidTangentMap, ConjugatesToSU) {
  const Billiard b(make_ellipse(0.6), mixed(1.0));
  PhaseGen gen(b, 8);
  for (int i = 0; i < 50; ++i) {
    const PhasePointSU p = gen.next();
    const PhasePointSU q = step_su(b, p);
    const Mat2 su = tangent_map_su(b, {p.piece, p.s}, {q.piece, q.s});
    const double th = std::acos(-p.u), th1 = std::acos(-q.u);
    const double L = chord_data(b, {p.piece, p.s}, {q.piece, q.s}).L;
    const double k0 = euclid_curvature(b, p.piece, p.s).kappa, k1 = euclid_curvature(b, q.piece, q.s).kappa;
    const Mat2 e = euclid_tangent_map(p.s, th, q.s, th1, L, k0, k1);
    const Mat2 conj{e.m11, e.m12 / std::sin(th), e.m21 * std::sin(th1), e.m22 * std::sin(th1) / std::sin(th)};
    EXPECT_NEAR(su.m11, conj.m11, 1e-8 * (1 + std::abs(conj.m11)));
    EXPECT_NEAR(su.m12, conj.m12, 1e-8 * (1 + std::abs(conj.m12)));
    EXPECT_NEAR(su.m21, conj.m21, 1e-8 * (1 + std::abs(conj.m21)));
    EXPECT_NEAR(su.m22, conj.m22, 1e-8 * (1 + std::abs(conj.m22)));
  }
}

TEST(Iterate, LemonTwoOrbitAlternates) {
  const Billiard lemon(make_lemon(1.0), mixed(0.9));
  const Orbit o = iterate(lemon, {0, 0.0, 0.0}, 100);
  ASSERT_FALSE(o.terminal);
  ASSERT_EQ(o.points.size(), 101u);
  for (std::size_t i = 0; i < o.points.size(); ++i) {
    EXPECT_EQ(o.points[i].piece, static_cast<int>(i % 2));
    EXPECT_NEAR(o.points[i].s, 0.0, 1e-12);
    EXPECT_NEAR(o.points[i].u, 0.0, 1e-12);
  }
}

TEST(Iterate, HyperbolicCircleSeparates) {
  const Billiard c(make_circle(1.0), mixed(0.8));
  const Orbit o = iterate(c, {0, 0.0, 1e-6}, 100);
  double max_dev = 0.0;
  for (const auto& p : o.points) max_dev = std::max(max_dev, std::abs(p.s) + std::abs(p.u));
  EXPECT_GT(max_dev, 0.1);
}

TEST(Iterate, TerminalEventIsRecorded) {
  const Billiard lemon(make_lemon(1.0), mixed(1.0));
  const Vec2 corner = lemon.piece(1).point(lemon.piece(1).tau_hi);
  const Orbit o = iterate_state(lemon, {{0, 0}, corner / euclid_norm(corner), 0, 0.0, 0.0}, 10);
  ASSERT_TRUE(o.terminal);
  EXPECT_EQ(*o.terminal, ErrorCode::CornerHit);
  EXPECT_EQ(o.states.size(), 1u);
}
