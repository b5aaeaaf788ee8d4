#include "mbill/dynamics.hpp"

#include <atomic>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace mbill {

namespace {

constexpr double kPi = std::numbers::pi;

std::atomic<double> g_tangent_fault{0.0};

// Root of f on [a, b] given opposite-signed end values.
template <class Fn>
double solve_bracket(Fn&& f, double a, double b, double fa, double fb) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (r.first + r.second);
}

Vec2 unit_tangent(const Piece& p, double tau) {
  const Vec2 d = p.derivative(tau, 1);
  return d / euclid_norm(d);
}

void check_junction(const Billiard& b, int piece, double s) {
  const Table& t = b.table();
  const ArcChart& c = b.chart(piece);
  const bool near_start = s - c.s_lo() <= 1e-9 && !t.smooth_after[static_cast<std::size_t>(t.prev(piece))];
  const bool near_end = c.s_hi() - s <= 1e-9 && !t.smooth_after[static_cast<std::size_t>(piece)];
  if (near_start || near_end) {
    fail(ErrorCode::CornerHit, "chord ends at a corner of piece " + std::to_string(piece));
  }
}

}  // namespace

Vec2 reflect(const Norm& norm, Vec2 tangent, Vec2 incident) {
  const double len = euclid_norm(tangent);
  if (!(len > 0.0)) fail(ErrorCode::InvalidArgument, "reflection needs a nonzero boundary tangent");
  const Vec2 t = tangent / len;
  const Vec2 n = perp(t);
  if (!(dot(n, incident) < 0.0)) fail(ErrorCode::NoRoot, "incident direction does not arrive at the boundary");
  const double c = norm.gradient(incident)(t);
  // grad F(w(phi)) . t decreases from F(t) to -F(-t) over the inward half-plane.
  auto g = [&](double phi) { return norm.gradient(std::cos(phi) * t + std::sin(phi) * n)(t) - c; };
  const double g0 = g(0.0), g1 = g(kPi);
  if (!(g0 > 0.0 && g1 < 0.0)) fail(ErrorCode::NoRoot, "reflection law has no inward solution");
  const double phi = solve_bracket(g, 0.0, kPi, g0, g1);
  const Vec2 w = std::cos(phi) * t + std::sin(phi) * n;
  return w / norm.value(w);
}

Vec2 reflect_by_construction(const Norm& norm, Vec2 tangent, Vec2 incident) {
  const double len = euclid_norm(tangent);
  if (!(len > 0.0)) fail(ErrorCode::InvalidArgument, "reflection needs a nonzero boundary tangent");
  const Vec2 t = tangent / len;
  const Vec2 n = perp(t);
  if (!(dot(n, incident) < 0.0)) fail(ErrorCode::NoRoot, "incident direction does not arrive at the boundary");
  // The tangent line of the indicatrix at the incident point meets the line
  // R t at w = t / c.  The outgoing point is where the other tangent line
  // from w touches the indicatrix; h is scaled by c so c = 0 needs no case.
  const double c = norm.gradient(incident)(t);
  auto h = [&](double theta) {
    const Vec2 e = std::cos(theta) * t + std::sin(theta) * n;
    const Vec2 ep = -std::sin(theta) * t + std::cos(theta) * n;
    const double fe = norm.value(e);
    const double r = 1.0 / fe;
    const double dr = -norm.gradient(e)(ep) / (fe * fe);
    const Vec2 P = r * e;
    const Vec2 dP = dr * e + r * ep;
    return cross(dP, t - c * P);
  };
  const double h0 = h(0.0), h1 = h(kPi);
  if (!(h0 * h1 < 0.0)) fail(ErrorCode::NoRoot, "tangent-line construction found no outgoing point");
  const double theta = solve_bracket(h, 0.0, kPi, h0, h1);
  const Vec2 w = std::cos(theta) * t + std::sin(theta) * n;
  return w / norm.value(w);
}

Impact next_impact(const Billiard& billiard, const StatePoint& state) {
  const Table& table = billiard.table();
  const Vec2 x0 = state.position;
  const Vec2 d = state.direction;
  // Negative on the boundary between the start and the hit (counterclockwise),
  // positive between the hit and the start.
  auto f = [&](int j, double tau) { return cross(d, billiard.piece(j).point(tau) - x0); };

  // A point just ahead of the start with f < 0.
  auto first_negative = [&](int j, double from) -> std::optional<double> {
    const double span = billiard.piece(j).tau_hi - from;
    if (!(span > 1e-14 * (1.0 + std::abs(from)))) return std::nullopt;
    for (int m = 1; m <= 60; ++m) {
      const double tm = from + std::ldexp(span, -m);
      if (!(tm > from)) break;
      if (f(j, tm) < 0.0) return tm;
    }
    return std::nullopt;
  };

  int jn = state.piece;
  std::optional<double> neg = first_negative(jn, state.tau);
  if (!neg) {
    jn = table.next(state.piece);
    neg = first_negative(jn, billiard.piece(jn).tau_lo);
  }
  if (!neg) fail(ErrorCode::TangentialHit, "chord leaves the start tangentially");

  // Crossing on [lo, hi] of piece j; rounding can leave f(lo) marginally
  // nonnegative when the hit sits on the junction itself.
  auto crossing = [&](int j, double lo, double hi, double fhi) {
    const double flo = f(j, lo);
    if (flo >= 0.0) return lo;
    return solve_bracket([&](double x) { return f(j, x); }, lo, hi, flo, fhi);
  };

  int hit_piece = -1;
  double hit_tau = 0.0;
  {
    const Piece& p = billiard.piece(jn);
    const double fe = f(jn, p.tau_hi);
    if (fe >= 0.0) {
      hit_piece = jn;
      hit_tau = crossing(jn, *neg, p.tau_hi, fe);
    }
  }
  for (int q = table.next(jn); hit_piece < 0; q = table.next(q)) {
    const Piece& p = billiard.piece(q);
    if (q == state.piece) {
      // Back on the starting piece: the hit lies before the start.
      const double span = state.tau - p.tau_lo;
      double pos = std::numeric_limits<double>::quiet_NaN();
      for (int m = 1; m <= 60; ++m) {
        const double tm = state.tau - std::ldexp(span, -m);
        if (!(tm < state.tau)) break;
        if (f(q, tm) > 0.0) {
          pos = tm;
          break;
        }
      }
      if (std::isnan(pos)) fail(ErrorCode::TangentialHit, "chord does not cross the boundary");
      hit_piece = q;
      hit_tau = crossing(q, p.tau_lo, pos, f(q, pos));
      break;
    }
    const double fe = f(q, p.tau_hi);
    if (fe >= 0.0) {
      hit_piece = q;
      hit_tau = crossing(q, p.tau_lo, p.tau_hi, fe);
    }
    if (q == jn) fail(ErrorCode::TangentialHit, "chord does not cross the boundary");
  }

  const Piece& p = billiard.piece(hit_piece);
  Impact out{hit_piece, billiard.chart(hit_piece).s_of_tau(hit_tau), hit_tau, p.point(hit_tau)};
  check_junction(billiard, hit_piece, out.s);
  const double sin_angle = std::abs(cross(d / euclid_norm(d), unit_tangent(p, hit_tau)));
  if (sin_angle < 1e-8) fail(ErrorCode::TangentialHit, "chord meets the boundary tangentially");
  return out;
}

StatePoint step_state(const Billiard& billiard, const StatePoint& state) {
  const Impact hit = next_impact(billiard, state);
  const Vec2 t = billiard.piece(hit.piece).derivative(hit.tau, 1);
  return {hit.position, reflect(billiard.norm(), t, state.direction), hit.piece, hit.s, hit.tau};
}

StatePoint reverse_state(const Billiard& billiard, const StatePoint& state) {
  StatePoint out = state;
  out.direction = reflect(billiard.norm(), billiard.piece(state.piece).derivative(state.tau, 1), -state.direction);
  return out;
}

ChordData chord_data(const Billiard& billiard, BoundaryLocation from, BoundaryLocation to) {
  const BoundaryPoint p0 = boundary_point(billiard, from.piece, from.s);
  const BoundaryPoint p1 = boundary_point(billiard, to.piece, to.s);
  const Vec2 v = p1.position - p0.position;
  if (!(euclid_norm(v) > 1e-14)) fail(ErrorCode::CoincidentPoints, "chord endpoints coincide");
  const Covec2 g = billiard.norm().gradient(v);
  return {billiard.norm().value(v), -g(p0.tangent), -g(p1.tangent)};
}

std::pair<double, double> admissible_u(const Billiard& billiard, int piece, double s) {
  const Vec2 t = boundary_point(billiard, piece, s).tangent;
  return {-billiard.norm().value(t), billiard.norm().value(-t)};
}

namespace {

struct SuSolver {
  const Norm& norm;
  Vec2 T;  // F-unit tangent
  Vec2 t;
  Vec2 n;

  SuSolver(const Norm& f, Vec2 tangent) : norm(f), T(tangent), t(tangent / euclid_norm(tangent)), n(perp(t)) {}
  Vec2 dir(double phi) const { return std::cos(phi) * t + std::sin(phi) * n; }
  double u(double phi) const { return -norm.gradient(dir(phi))(T); }
};

}  // namespace

Vec2 direction_from_su(const Billiard& billiard, const PhasePointSU& p) {
  const BoundaryPoint bp = boundary_point(billiard, p.piece, p.s);
  const SuSolver sv(billiard.norm(), bp.tangent);
  const double lo = sv.u(0.0), hi = sv.u(kPi);
  if (!(p.u > lo && p.u < hi)) {
    fail(ErrorCode::OutOfRange, "u = " + std::to_string(p.u) + " outside the admissible interval (" +
                                    std::to_string(lo) + ", " + std::to_string(hi) + ")");
  }
  const double phi = solve_bracket([&](double x) { return sv.u(x) - p.u; }, 0.0, kPi, lo - p.u, hi - p.u);
  const Vec2 w = sv.dir(phi);
  return w / billiard.norm().value(w);
}

bool su_monotone(const Billiard& billiard, int piece, double s, int samples) {
  const SuSolver sv(billiard.norm(), boundary_point(billiard, piece, s).tangent);
  double prev = sv.u(0.0);
  for (int i = 1; i <= samples; ++i) {
    const double cur = sv.u(kPi * i / samples);
    if (!(cur > prev)) return false;
    prev = cur;
  }
  return true;
}

StatePoint state_from_su(const Billiard& billiard, const PhasePointSU& p) {
  const double tau = billiard.chart(p.piece).tau_of_s(p.s);
  return {billiard.piece(p.piece).point(tau), direction_from_su(billiard, p), p.piece, p.s, tau};
}

PhasePointSU su_from_state(const Billiard& billiard, const StatePoint& state) {
  const Vec2 d1 = billiard.piece(state.piece).derivative(state.tau, 1);
  const Vec2 T = d1 / billiard.norm().value(d1);
  return {state.piece, state.s, -billiard.norm().gradient(state.direction)(T)};
}

PhasePointSU step_su(const Billiard& billiard, const PhasePointSU& p) {
  const StatePoint st = state_from_su(billiard, p);
  const Impact hit = next_impact(billiard, st);
  const Vec2 d1 = billiard.piece(hit.piece).derivative(hit.tau, 1);
  const Vec2 T1 = d1 / billiard.norm().value(d1);
  return {hit.piece, hit.s, -billiard.norm().gradient(st.direction)(T1)};
}

TangentMatrix tangent_map_su(const Billiard& billiard, BoundaryLocation from, BoundaryLocation to) {
  const Norm& F = billiard.norm();
  const ArcFrame f0 = arc_frame(billiard, from.piece, from.s);
  const ArcFrame f1 = arc_frame(billiard, to.piece, to.s);
  const Vec2 v = f1.position - f0.position;
  if (!(euclid_norm(v) > 1e-14)) fail(ErrorCode::CoincidentPoints, "chord endpoints coincide");
  const Sym2 H = F.hessian(v);
  const Covec2 g = F.gradient(v);
  const double D = H.bilinear(f0.d1, f1.d1);
  if (!(std::abs(D) * euclid_norm(v) > 1e-12)) {
    fail(ErrorCode::DegenerateDenominator, "chord is tangent to the boundary at an endpoint");
  }
  const double ds1_ds = (H.bilinear(f0.d1, f0.d1) - g(f0.d2)) / D;
  const double ds1_du = -1.0 / D;
  const double A1 = H.bilinear(f1.d1, f1.d1) + g(f1.d2);
  return {ds1_ds + g_tangent_fault.load(std::memory_order_relaxed), ds1_du, H.bilinear(f1.d1, f0.d1) - A1 * ds1_ds,
          A1 / D};
}

void set_tangent_map_fault(double delta) noexcept { g_tangent_fault.store(delta, std::memory_order_relaxed); }

TangentMatrix euclid_tangent_map(double /*s*/, double theta, double /*s1*/, double theta1, double L, double kappa,
                                 double kappa1) {
  const double st = std::sin(theta), st1 = std::sin(theta1);
  if (!(st1 > 0.0)) fail(ErrorCode::GrazingAngle, "outgoing angle must lie in (0, pi)");
  return {(L * kappa - st) / st1, L / st1, (L * kappa * kappa1 - kappa1 * st - kappa * st1) / st1,
          (L * kappa1 - st1) / st1};
}

Orbit iterate_state(const Billiard& billiard, const StatePoint& start, int n) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "orbit length must be at least 1");
  Orbit o;
  o.states.reserve(static_cast<std::size_t>(n) + 1);
  o.points.reserve(static_cast<std::size_t>(n) + 1);
  o.states.push_back(start);
  o.points.push_back(su_from_state(billiard, start));
  StatePoint st = start;
  for (int i = 0; i < n; ++i) {
    try {
      st = step_state(billiard, st);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::CornerHit && e.code() != ErrorCode::TangentialHit) throw;
      o.terminal = e.code();
      o.message = e.what();
      break;
    }
    o.states.push_back(st);
    o.points.push_back(su_from_state(billiard, st));
  }
  return o;
}

Orbit iterate(const Billiard& billiard, const PhasePointSU& start, int n) {
  Orbit o = iterate_state(billiard, state_from_su(billiard, start), n);
  o.points.front() = start;
  return o;
}

}  // namespace mbill
