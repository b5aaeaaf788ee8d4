#include "mbill/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "mbill/dynamics.hpp"
#include "mbill/map_jet.hpp"
#include "mbill/normalform.hpp"
#include "mbill/studio.hpp"

namespace mbill::acceptance {

namespace {

constexpr double kPi = std::numbers::pi;

using Clock = std::chrono::steady_clock;

std::shared_ptr<const Norm> mixed(double a) { return std::make_shared<MixedNorm>(MixedNorm::standard(a)); }

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

double rel(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

struct Tracker {
  double worst = 0.0;
  void add(double r) { worst = std::max(worst, std::isfinite(r) ? r : INFINITY); }
};

// Random transversal phase point on a curved piece.
PhasePointSU random_phase_point(const Billiard& b, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pc(0, static_cast<int>(b.table().size()) - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    const int piece = pc(rng);
    if (!b.piece(piece).has_vertex()) continue;
    const ArcChart& c = b.chart(piece);
    const double s = c.s_lo() + (0.05 + 0.9 * unit(rng)) * (c.s_hi() - c.s_lo());
    const auto [lo, hi] = admissible_u(b, piece, s);
    return {piece, s, lo + (0.1 + 0.8 * unit(rng)) * (hi - lo)};
  }
}

// Third-order vertex partials of s1, u1 for F = a|v|_2 + (1-a)|v|_4, indexed
// [s^3, s^2 u, s u^2, u^3].  u1[0] carries the corrected overall sign.
struct VertexPartials {
  double s1[4];
  double u1[4];
  double u1_sss_literal;
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
  p.u1_sss_literal = (6 * L * R2 - 8 * a5 * R3 - 12 * a3 * L * R * (L + R) + 3 * a2 * L2 * (L + 3 * R) +
                         2 * a4 * R2 * (8 * L + 3 * R) - 3 * a * L * (L2 - L * R + 3 * R2) +
                         a * R * (L3 - 3 * a * L2 * R + 4 * a2 * L * R2 - 2 * a3 * R3) * Rpp) /
                        (a4 * std::pow(R, 6));
  p.u1[0] = -p.u1_sss_literal;
  p.u1[1] = -(6 * a4 * L * R2 - a3 * R * (9 * L2 + 3 * L * R + 2 * R2) + a2 * L * (3 * L2 + 6 * L * R + R2) -
              3 * a * L * (L2 - L * R + 3 * R2) + a * L * R * Rpp * (L - a * R) * (L - a * R) + 6 * L * R2) /
            (a4 * std::pow(R, 5));
  p.u1[2] = -(6 * L * R2 + 2 * a4 * L * R2 + a2 * L * (3 * L2 + 3 * L * R + 2 * R2) -
              3 * a * L * (L2 - L * R + 3 * R2) - 2 * a3 * (3 * L2 * R + R3) + a * L2 * R * (L - a * R) * Rpp) /
            (a4 * std::pow(R, 4));
  p.u1[3] = (3 * (a - 1) * L * (a2 * L * R - a * (L2 - L * R + R2) + 2 * R2) - a * L3 * R * Rpp) / (a4 * R3);
  return p;
}

class FaultGuard {
 public:
  explicit FaultGuard(double delta) { set_tangent_map_fault(delta); }
  ~FaultGuard() { set_tangent_map_fault(0.0); }
  FaultGuard(const FaultGuard&) = delete;
  FaultGuard& operator=(const FaultGuard&) = delete;
};

// Each check fills details and returns pass; exceptions count as failure.
using Check = std::function<bool(std::vector<std::string>&)>;

Criterion run(int id, std::string title, const Check& check) {
  Criterion c;
  c.id = id;
  c.title = std::move(title);
  const auto t0 = Clock::now();
  try {
    c.pass = check(c.details);
  } catch (const std::exception& e) {
    c.pass = false;
    c.details.push_back(std::string("exception: ") + e.what());
  }
  c.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return c;
}

bool norm_validity(std::vector<std::string>& d, std::uint64_t seed, double& seconds) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> ua(0.05, 1.0), ub(0.0, 1.0), ang(0.0, 2 * kPi), mag(-2.0, 2.0);
  std::uniform_int_distribution<int> uk(1, 4);
  int bad = 0;
  double min_eig = INFINITY;
  for (int i = 0; i < 1000; ++i) {
    const MixedNorm F(ua(rng), ub(rng), uk(rng));
    const Vec2 v = std::pow(10.0, mag(rng)) * unit_vector(ang(rng));
    const Sym2 g = fundamental_tensor(F, v);
    const double e = g.eigenvalues()[0];
    min_eig = std::min(min_eig, e);
    if (!(g.det() > 0.0 && g.trace() > 0.0)) ++bad;
  }
  seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  d.push_back("1000 samples, " + std::to_string(bad) + " not positive definite, smallest eigenvalue " + sci(min_eig));
  d.push_back("runtime " + sci(seconds) + " s (limit 1 s)");
  return bad == 0 && seconds < 1.0;
}

bool symplecticity(std::vector<std::string>& d, std::uint64_t seed) {
  Tracker t;
  int chords = 0;
  for (const Table& table : {make_lemon(1.0), make_ellipse(0.6), make_circle(1.0)}) {
    for (double a : {0.5, 0.8, 1.0}) {
      const Billiard b(table, mixed(a));
      std::mt19937_64 rng(seed + 2);
      int n = 0;
      while (n < 100) {
        const PhasePointSU p = random_phase_point(b, rng);
        PhasePointSU q;
        try {
          q = step_su(b, p);
        } catch (const Error&) {
          continue;  // corner or tangential hit, not a transversal chord
        }
        t.add(std::abs(tangent_map_su(b, {p.piece, p.s}, {q.piece, q.s}).det() - 1.0));
        ++n;
      }
      chords += n;
    }
  }
  d.push_back("max |det - 1| = " + sci(t.worst) + " over " + std::to_string(chords) + " chords (limit 1e-9)");
  return t.worst <= 1e-9;
}

bool generating_function(std::vector<std::string>& d) {
  Tracker tu, tu1;
  int checked = 0;
  const double h = 1e-6;
  for (const Table& table : {make_ellipse(0.7), make_circle(1.0)}) {
    for (double a : {0.5, 0.8, 1.0}) {
      const Billiard b(table, mixed(a));
      for (const PhasePointSU start : {PhasePointSU{0, 0.1, 0.3}, PhasePointSU{0, -0.4, -0.55}}) {
        const Orbit o = iterate(b, start, 50);
        if (o.terminal) fail(ErrorCode::InvalidArgument, "generating-function orbit ended early: " + o.message);
        for (std::size_t i = 0; i + 1 < o.points.size(); ++i) {
          const PhasePointSU& p = o.points[i];
          const PhasePointSU& q = o.points[i + 1];
          const ArcChart& cp = b.chart(p.piece);
          const ArcChart& cq = b.chart(q.piece);
          if (p.s - 2 * h < cp.s_lo() || p.s + 2 * h > cp.s_hi()) continue;
          if (q.s - 2 * h < cq.s_lo() || q.s + 2 * h > cq.s_hi()) continue;
          auto L = [&](double s, double s1) { return chord_data(b, {p.piece, s}, {q.piece, s1}).L; };
          tu.add(std::abs(p.u - (L(p.s + h, q.s) - L(p.s - h, q.s)) / (2 * h)));
          tu1.add(std::abs(q.u + (L(p.s, q.s + h) - L(p.s, q.s - h)) / (2 * h)));
          ++checked;
        }
      }
    }
  }
  d.push_back("max |u - dL/ds| = " + sci(tu.worst) + ", max |u1 + dL/ds1| = " + sci(tu1.worst) + " over " +
              std::to_string(checked) + " bounces (limit 1e-8)");
  return checked > 500 && tu.worst <= 1e-8 && tu1.worst <= 1e-8;
}

bool euclidean_reduction(std::vector<std::string>& d, std::uint64_t seed) {
  const MixedNorm e(1.0, 0.0);
  std::mt19937_64 rng(seed + 4);
  std::uniform_real_distribution<double> ang(0, 2 * kPi), out(0.05, kPi - 0.05);
  Tracker angles;
  for (int i = 0; i < 500; ++i) {
    const Vec2 t = unit_vector(ang(rng));
    const Vec2 in = rotate(t, -out(rng));
    const Vec2 v = reflect(e, t, in);
    const double ain = std::atan2(cross(t, in), dot(t, in));
    const double aout = std::atan2(cross(t, v), dot(t, v));
    angles.add(std::abs(aout + ain));
  }
  Tracker conj;
  const Billiard b(make_ellipse(0.6), mixed(1.0));
  int n = 0;
  while (n < 100) {
    const PhasePointSU p = random_phase_point(b, rng);
    PhasePointSU q;
    try {
      q = step_su(b, p);
    } catch (const Error&) {
      continue;
    }
    const Mat2 su = tangent_map_su(b, {p.piece, p.s}, {q.piece, q.s});
    const double th = std::acos(-p.u), th1 = std::acos(-q.u);
    const double L = chord_data(b, {p.piece, p.s}, {q.piece, q.s}).L;
    const Mat2 m = euclid_tangent_map(p.s, th, q.s, th1, L, euclid_curvature(b, p.piece, p.s).kappa,
                                      euclid_curvature(b, q.piece, q.s).kappa);
    const Mat2 c{m.m11, m.m12 / std::sin(th), m.m21 * std::sin(th1), m.m22 * std::sin(th1) / std::sin(th)};
    for (auto [x, y] : {std::pair{su.m11, c.m11}, {su.m12, c.m12}, {su.m21, c.m21}, {su.m22, c.m22}}) {
      conj.add(rel(x, y));
    }
    ++n;
  }
  d.push_back("max equal-angle defect " + sci(angles.worst) + " rad over 500 reflections (limit 1e-10)");
  d.push_back("max relative (s,u) vs conjugated (s,theta) entry gap " + sci(conj.worst) + " over 100 chords (limit 1e-8)");
  return angles.worst <= 1e-10 && conj.worst <= 1e-8;
}

bool vertex_matrix(std::vector<std::string>& d) {
  Tracker t;
  int cases = 0;
  for (int i = 3; i <= 10; ++i) {
    const double a = i / 10.0;
    for (const Table& table :
         {make_lemon(0.7), make_ellipse(0.6), make_polynomial_table({0.6, 0.2}, {0.6, 0.2}, 1.2)}) {
      const Billiard b(table, mixed(a));
      const VertexData v = vertex_data(b);
      const double L = v.L, R = v.R0;
      const Mat2 m = tangent_map_su(b, {(*table.vertex_pieces)[0], 0.0}, {(*table.vertex_pieces)[1], 0.0});
      const Mat2 w{L / (a * R) - 1, L / a, (L - 2 * a * R) / (a * R * R), L / (a * R) - 1};
      for (auto [x, y] : {std::pair{m.m11, w.m11}, {m.m12, w.m12}, {m.m21, w.m21}, {m.m22, w.m22}}) t.add(rel(x, y));
      ++cases;
    }
  }
  d.push_back("max relative entry error " + sci(t.worst) + " over " + std::to_string(cases) +
              " (a, table) cases (limit 1e-8)");
  return t.worst <= 1e-8;
}

bool jet_oracle(std::vector<std::string>& d) {
  const std::vector<std::array<double, 2>> arcs = {{0.5, 0.0}, {0.7, 0.1}, {1.0, -0.2}};
  Tracker third, second, literal;
  const double fact[4] = {1, 1, 2, 6};
  for (double a : {0.5, 0.8, 1.0}) {
    for (double L : {0.45, 0.9, 1.35}) {
      for (const auto& c : arcs) {
        const std::vector<double> alpha{c[0], c[1]};
        const Billiard b(make_polynomial_table(alpha, alpha, L), mixed(a));
        const MapJet mj = map_jet(b);
        const double R = 1 / (2 * c[0]);
        const double Rpp = 6 * c[0] - 6 * c[1] / (c[0] * c[0]);
        const VertexPartials w = vertex_partials(a, L, R, Rpp);
        for (int k = 0; k <= 3; ++k) {
          const double scale = fact[3 - k] * fact[k];
          third.add(rel(scale * mj.s1(3 - k, k), w.s1[k]));
          third.add(rel(scale * mj.u1(3 - k, k), w.u1[k]));
        }
        literal.add(rel(6 * mj.u1(3, 0), w.u1_sss_literal));
        for (int k = 0; k <= 2; ++k) {
          second.add(std::abs(mj.s1(2 - k, k)));
          second.add(std::abs(mj.u1(2 - k, k)));
        }
      }
    }
  }
  d.push_back("max relative third-order error " + sci(third.worst) + " over 27 grid points x 8 partials (limit 1e-6)");
  d.push_back("max |j+k=2 coefficient| " + sci(second.worst) + " (limit 1e-8)");
  d.push_back("d3u1/ds3 literal closed form: max relative deviation " + sci(literal.worst) +
              " (overall sign reversed; the sign-corrected form is the oracle)");
  return third.worst <= 1e-6 && second.worst <= 1e-8;
}

struct SymCase {
  Table table;
  double a;
};

std::vector<SymCase> twist_grid() {
  std::vector<SymCase> out;
  for (double a : {0.3, 0.5, 0.7, 0.9, 1.0}) {
    for (double f : {0.3, 0.7, 1.3, 1.7}) {
      if (f * a < 2.0) out.push_back({make_lemon(f * a), a});
      const double dl = std::sqrt(f * a / 2);
      if (dl < 1.0) out.push_back({make_ellipse(dl), a});
      out.push_back({make_polynomial_table({0.5, 0.2}, {0.5, 0.2}, f * a), a});
    }
  }
  return out;
}

bool twist_cross_validation(std::vector<std::string>& d) {
  Tracker num, forms, resid;
  int used = 0;
  for (const auto& [table, a] : twist_grid()) {
    const Billiard b(table, mixed(a));
    const VertexData v = vertex_data(b);
    const MapJet jet = map_jet(b);
    if (classify(jet.linear()).kind != LinearClass::Elliptic) continue;
    if (!check_nonresonance(jet.linear(), ResonanceContext::symmetric(a, v.L, v.R0)).ok) continue;
    const TwistResult tw = twist_from_jet(jet);
    const double closed = twist_symmetric_closed(a, v.L, v.R0, v.R0pp);
    num.add(std::abs(tw.tau1 - closed) / (1 + std::abs(closed)));
    const double scale = 1e-8 * (1 + std::abs(tw.c30) + std::abs(tw.c21));
    resid.add(std::max(tw.residual_re_c21, tw.residual_c12) / scale);
    ++used;
  }
  for (double a : {0.3, 0.5, 0.7, 0.9, 1.0}) {
    for (double R : {0.5, 1.0, 2.0}) {
      for (double Rpp : {-3.0, 0.0, 1.7}) {
        for (double f : {0.2, 0.7, 1.3, 1.9}) {
          const double L = f * a * R;
          const double x = twist_symmetric_closed(a, L, R, Rpp);
          forms.add(std::abs(x - twist_symmetric_closed_ab(a, 1 - a, L, R, Rpp)) / std::max(1.0, std::abs(x)));
        }
      }
    }
  }
  d.push_back("max |tau1_numeric - closed| / (1 + |tau1|) = " + sci(num.worst) + " over " + std::to_string(used) +
              " elliptic nonresonant cases (limit 1e-6)");
  d.push_back("symmetric closed forms (two algebraic versions) max gap " + sci(forms.worst) + " (limit 1e-12)");
  d.push_back("pipeline residuals max " + sci(resid.worst) + " x 1e-8 (1 + |c30| + |c21|) (limit 1)");
  return used >= 40 && num.worst <= 1e-6 && forms.worst <= 1e-12 && resid.worst <= 1.0;
}

bool spot_values(std::vector<std::string>& d) {
  bool ok = true;
  auto tau = [](Table t, double a) { return twist_from_jet(map_jet(Billiard(std::move(t), mixed(a)))).tau1; };
  auto check = [&](const std::string& what, double got, double want, double tol) {
    const bool pass = std::abs(got - want) <= tol;
    ok = ok && pass;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s: %.12g (want %.10g +- %.0e)%s", what.c_str(), got, want, tol,
                  pass ? "" : "  FAIL");
    d.emplace_back(buf);
  };
  for (double L : {0.3, 0.5, 1.5}) check("lemon a=1 L=" + studio::format_double(L), tau(make_lemon(L), 1.0), 0.125, 1e-8);
  check("lemon a=0.9 L=1", tau(make_lemon(1.0), 0.9), -0.04050926, 1e-7);
  check("lemon a=0.9 L=0.8205128", tau(make_lemon(0.8205128), 0.9), 0.0, 1e-7);
  const double dz = std::sqrt(0.81 + 8.1 - 6) / (2 * std::sqrt(0.9));
  check("ellipse a=0.9 delta=" + studio::format_double(dz), tau(make_ellipse(dz), 0.9), 0.0, 1e-7);
  d.push_back("  (the approximation delta=0.8990719 gives " + sci(tau(make_ellipse(0.8990719), 0.9)) +
              "; the zero is at the formula value)");
  const auto circle = classify(map_jet(Billiard(make_circle(1.0), mixed(0.8))).linear());
  check("circle a=0.8 trace", circle.trace, 3.0, 1e-9);
  const bool hyper = circle.kind == LinearClass::Hyperbolic;
  d.push_back(std::string("circle a=0.8 class ") + std::string(to_string(circle.kind)));
  return ok && hyper;
}

bool doubling(std::vector<std::string>& d) {
  Tracker t;
  std::vector<SymCase> cases;
  cases.push_back({make_lemon(0.5), 0.9});
  cases.push_back({make_lemon(1.2), 0.8});
  cases.push_back({make_ellipse(0.5), 0.9});
  cases.push_back({make_ellipse(0.3), 0.5});
  cases.push_back({make_polynomial_table({0.5, 0.2}, {0.5, 0.2}, 0.4), 0.6});
  for (const auto& [table, a] : cases) {
    const Billiard b(table, mixed(a));
    t.add(std::abs(twist_from_jet(two_step_jet(b)).tau1 - 2 * twist_from_jet(map_jet(b)).tau1));
  }
  d.push_back("max |tau1(T^2) - 2 tau1(T)| = " + sci(t.worst) + " over " + std::to_string(cases.size()) +
              " symmetric tables (limit 1e-7)");
  return t.worst <= 1e-7;
}

bool asymmetric_limit(std::vector<std::string>& d) {
  const double t = twist_from_jet(two_step_jet(Billiard(make_lemon(0.5, 1.0, 2.0), mixed(1.0)))).tau1;
  const double euclid = twist_asymmetric_euclidean(0.5, 1.0, 2.0, 0.0, 0.0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "a=1 R0=1 R1=2 L=0.5: tau1_numeric %.12g, Euclidean formula %.12g (want 0.1875 +- 1e-6)", t,
                euclid);
  d.emplace_back(buf);
  // The literal two-step numerator, compared without asserting.
  Tracker dev;
  for (double a : {0.6, 0.8, 1.0}) {
    for (double L : {0.2, 0.4}) {
      const Billiard b(make_lemon(L, 1.0, 2.0), mixed(a));
      const double num = twist_from_jet(two_step_jet(b)).tau1;
      const double literal = twist_asymmetric_closed(a, L, 1.0, 2.0, 0.0, 0.0).value;
      dev.add(std::abs(literal - num));
      std::snprintf(buf, sizeof buf, "  a=%.1f L=%.1f: numeric %.10g, literal numerator %.10g", a, L, num, literal);
      d.emplace_back(buf);
    }
  }
  d.push_back("literal numerator max deviation " + sci(dev.worst) + " (recorded, not asserted)");
  return std::abs(t - 0.1875) <= 1e-6;
}

bool reversibility(std::vector<std::string>& d, std::uint64_t seed) {
  Tracker t;
  int orbits = 0;
  std::mt19937_64 rng(seed + 11);
  for (const Table& table : {make_ellipse(0.6), make_circle(1.0), make_lemon(1.2)}) {
    for (double a : {0.5, 0.8, 1.0}) {
      const Billiard b(table, mixed(a));
      int n = 0;
      while (n < 5) {
        const StatePoint start = state_from_su(b, random_phase_point(b, rng));
        const Orbit fwd = iterate_state(b, start, 20);
        if (fwd.terminal) continue;
        const Orbit back = iterate_state(b, reverse_state(b, fwd.states.back()), 20);
        if (back.terminal) continue;
        const StatePoint end = reverse_state(b, back.states.back());
        t.add(std::max(euclid_norm(end.position - start.position), euclid_norm(end.direction - start.direction)));
        ++n;
      }
      orbits += n;
    }
  }
  d.push_back("max retrace error " + sci(t.worst) + " over " + std::to_string(orbits) + " 20-bounce orbits (limit 1e-7)");
  return t.worst <= 1e-7;
}

bool hyperbolic_diameter(std::vector<std::string>& d) {
  const Billiard b(make_circle(1.0), mixed(0.8));
  const Orbit o = iterate(b, {0, 0.0, 1e-6}, 500);
  double far = 0.0;
  int when = -1;
  for (std::size_t k = 0; k < o.points.size(); ++k) {
    const PhasePointSU& p = o.points[k];
    const double dist = std::hypot(p.s, p.u);  // both pieces carry a diameter end at s = 0
    if (dist > far) far = dist;
    if (when < 0 && dist > 1e-2) when = static_cast<int>(k);
  }
  d.push_back("orbit from 1e-6 off the diameter point leaves the 1e-2 ball at bounce " + std::to_string(when) +
              ", max distance " + sci(far));
  return when > 0;
}

}  // namespace

std::vector<Criterion> run_all(const Options& options) {
  const FaultGuard fault(options.fault);
  const auto t0 = Clock::now();
  std::vector<Criterion> out;
  double c1_seconds = 0.0;
  out.push_back(run(1, "Norm validity", [&](auto& d) { return norm_validity(d, options.seed, c1_seconds); }));
  out.push_back(run(2, "Symplecticity", [&](auto& d) { return symplecticity(d, options.seed); }));
  out.push_back(run(3, "Generating-function identities", generating_function));
  out.push_back(run(4, "Euclidean reduction", [&](auto& d) { return euclidean_reduction(d, options.seed); }));
  out.push_back(run(5, "Vertex tangent matrix", vertex_matrix));
  out.push_back(run(6, "Jet oracle", jet_oracle));
  out.push_back(run(7, "Twist cross-validation", twist_cross_validation));
  out.push_back(run(8, "Application spot values", spot_values));
  out.push_back(run(9, "Doubling identity", doubling));
  out.push_back(run(10, "Asymmetric Euclidean limit", asymmetric_limit));
  out.push_back(run(11, "Reversibility", [&](auto& d) { return reversibility(d, options.seed); }));

  out.push_back(run(12, "Runtime budget and portrait", [&](std::vector<std::string>& d) {
    namespace fs = std::filesystem;
    fs::path dir = options.scratch;
    const bool temp = dir.empty();
    if (temp) dir = fs::temp_directory_path() / ("mbill-verify-" + std::to_string(Clock::now().time_since_epoch().count()));
    studio::RunConfig cfg;
    cfg.norm = {0.8, 0.2, 2};
    cfg.table.kind = "circle";
    cfg.table.radius = 1.0;
    studio::Options o;
    o.out_dir = dir;
    o.jobs = options.jobs;
    const auto p0 = Clock::now();
    std::ostringstream log;
    const int code = studio::cmd_portrait(cfg, o, log);
    const double portrait_s = std::chrono::duration<double>(Clock::now() - p0).count();
    const auto csv_size = fs::file_size(dir / "portrait.csv");
    if (temp) fs::remove_all(dir);
    const bool diameter = hyperbolic_diameter(d);
    const double total = std::chrono::duration<double>(Clock::now() - t0).count();
    d.push_back("portrait circle a=0.8 40x40x500: " + sci(portrait_s) + " s (limit 30 s), exit " +
                std::to_string(code) + ", csv " + std::to_string(csv_size) + " bytes");
    d.push_back("suite runtime " + sci(total) + " s (limit 60 s)");
    return code == 0 && portrait_s < 30.0 && diameter && total < 60.0;
  }));
  return out;
}

void print(const std::vector<Criterion>& results, std::ostream& os, bool verbose) {
  int passed = 0;
  for (const auto& c : results) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s %2d  %-32s %8.3f s", c.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), c.seconds);
    os << buf << '\n';
    if (verbose || !c.pass) {
      for (const auto& line : c.details) os << "        " << line << '\n';
    }
    passed += c.pass;
  }
  os << passed << " of " << results.size() << " criteria passed\n";
}

int verify(const Options& options, std::ostream& os, bool verbose) {
  const auto results = run_all(options);
  print(results, os, verbose);
  for (const auto& c : results) {
    if (!c.pass) return 1;
  }
  return 0;
}

}  // namespace mbill::acceptance
