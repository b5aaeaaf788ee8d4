#include "mbill/geometry.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "mbill/error.hpp"

namespace mbill {

namespace {

constexpr double kPi = std::numbers::pi;

double falling_factorial(int n, int k) {
  double f = 1.0;
  for (int i = 0; i < k; ++i) f *= n - i;
  return f;
}

double poly_derivative(const std::vector<double>& c, double t, int order) {
  double total = 0.0;
  for (std::size_t n = 0; n < c.size(); ++n) {
    const int p = 2 * static_cast<int>(n) + 2;
    if (p < order) continue;
    total += c[n] * falling_factorial(p, order) * std::pow(t, p - order);
  }
  return total;
}

// First t in (0, t_max] where g changes sign from positive, found on a uniform
// scan and refined by bisection; infinity if g stays positive.
double first_nonpositive(const std::function<double(double)>& g, double t_max) {
  constexpr int kSteps = 4000;
  double prev = 0.0;
  for (int i = 1; i <= kSteps; ++i) {
    const double t = t_max * i / kSteps;
    if (g(t) <= 0.0) {
      double lo = prev, hi = t;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? lo : hi) = mid;
      }
      return lo;
    }
    prev = t;
  }
  return std::numeric_limits<double>::infinity();
}

Piece make_arc_piece(PieceKind kind, Vec2 origin, double angle, double lo, double hi) {
  Piece p;
  p.kind = kind;
  p.origin = origin;
  p.set_angle(angle);
  p.tau_lo = lo;
  p.tau_hi = hi;
  return p;
}

Piece make_segment(Vec2 from, Vec2 to) {
  Piece p;
  p.kind = PieceKind::Segment;
  p.origin = from;
  const Vec2 d = to - from;
  // Local direction (0, -1) must map to d.
  p.set_angle(std::atan2(d.y, d.x) + 0.5 * kPi);
  p.tau_lo = 0.0;
  p.tau_hi = euclid_norm(d);
  return p;
}

}  // namespace

void Piece::set_angle(double angle) {
  const double q = angle / (0.5 * kPi);
  const double r = std::round(q);
  if (std::abs(q - r) < 1e-14) {
    const int turns = ((static_cast<int>(r) % 4) + 4) % 4;
    constexpr double c[4] = {1.0, 0.0, -1.0, 0.0};
    constexpr double s[4] = {0.0, 1.0, 0.0, -1.0};
    cos_a = c[turns];
    sin_a = s[turns];
  } else {
    cos_a = std::cos(angle);
    sin_a = std::sin(angle);
  }
}

Vec2 Piece::rotate_to_table(Vec2 v) const noexcept {
  return {cos_a * v.x - sin_a * v.y, sin_a * v.x + cos_a * v.y};
}

Vec2 Piece::to_table(Vec2 v) const noexcept { return origin + rotate_to_table(v); }

Vec2 Piece::local_derivative(double tau, int order) const {
  switch (kind) {
    case PieceKind::EvenPolynomial:
      return {poly_derivative(coeffs, tau, order), order == 0 ? -tau : (order == 1 ? -1.0 : 0.0)};
    case PieceKind::Ellipse: {
      const double shift = 0.5 * kPi * order;
      const double x = -B * std::cos(tau + shift) + (order == 0 ? B : 0.0);
      return {x, -A * std::sin(tau + shift)};
    }
    case PieceKind::Segment:
      return {0.0, order == 0 ? -tau : (order == 1 ? -1.0 : 0.0)};
  }
  return {};
}

Vec2 Piece::derivative(double tau, int order) const {
  const Vec2 v = local_derivative(tau, order);
  return order == 0 ? to_table(v) : rotate_to_table(v);
}

std::array<Jet2, 2> Piece::point_jet(const Jet2& tau) const {
  Jet2 x(tau.degree());
  Jet2 y(tau.degree());
  switch (kind) {
    case PieceKind::EvenPolynomial: {
      const Jet2 t2 = tau * tau;
      for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) x = (x + *it) * t2;
      y = -tau;
      break;
    }
    case PieceKind::Ellipse:
      x = B - B * cos(tau);
      y = -A * sin(tau);
      break;
    case PieceKind::Segment:
      y = -tau;
      break;
  }
  return {origin.x + cos_a * x - sin_a * y, origin.y + sin_a * x + cos_a * y};
}

double Piece::curvature(double tau) const {
  const Vec2 d1 = local_derivative(tau, 1);
  const Vec2 d2 = local_derivative(tau, 2);
  return cross(d1, d2) / std::pow(euclid_norm(d1), 3);
}

ArcSpec ArcSpec::polynomial(std::vector<double> c, double epsilon) {
  ArcSpec a;
  a.kind = Kind::Polynomial;
  a.coeffs = std::move(c);
  a.epsilon = epsilon;
  return a;
}

ArcSpec ArcSpec::circle(double radius) {
  ArcSpec a;
  a.kind = Kind::Circle;
  a.radius = radius;
  return a;
}

ArcSpec ArcSpec::ellipse(double delta) {
  ArcSpec a;
  a.kind = Kind::Ellipse;
  a.delta = delta;
  return a;
}

double default_epsilon(const std::vector<double>& alpha, const std::vector<double>& beta, double L) {
  auto convex_alpha = [&](double t) { return poly_derivative(alpha, t, 2); };
  auto convex_beta = [&](double t) { return poly_derivative(beta, t, 2); };
  auto gap = [&](double t) { return L - poly_derivative(alpha, t, 0) - poly_derivative(beta, t, 0); };

  // Search range: far enough that the arcs must have met or bent back.
  double t_max = 1.0;
  while (t_max < 1e6 && gap(t_max) > 0.0 && convex_alpha(t_max) > 0.0 && convex_beta(t_max) > 0.0) t_max *= 2.0;
  const double limit = std::min({first_nonpositive(convex_alpha, t_max), first_nonpositive(convex_beta, t_max),
                                 first_nonpositive(gap, t_max)});
  if (!std::isfinite(limit)) fail(ErrorCode::GeometryOverlap, "polynomial arcs never close the table");
  return 0.9 * limit;
}

Table make_polynomial_table(const std::vector<double>& alpha, const std::vector<double>& beta, double L,
                            double epsilon) {
  if (!(L > 0.0)) fail(ErrorCode::InvalidArgument, "table length L must be positive");
  if (alpha.empty() || beta.empty() || !(alpha[0] > 0.0) || !(beta[0] > 0.0)) {
    fail(ErrorCode::NonConvexArc, "polynomial arcs need a positive quadratic coefficient");
  }
  const double eps = epsilon > 0.0 ? epsilon : default_epsilon(alpha, beta, L);
  constexpr int kSamples = 400;
  for (int i = 0; i <= kSamples; ++i) {
    const double t = eps * i / kSamples;
    if (!(poly_derivative(alpha, t, 2) > 0.0) || !(poly_derivative(beta, t, 2) > 0.0)) {
      fail(ErrorCode::NonConvexArc, "polynomial arc loses strict convexity at t = " + std::to_string(t));
    }
  }
  if (!(poly_derivative(alpha, eps, 0) + poly_derivative(beta, eps, 0) < L)) {
    fail(ErrorCode::GeometryOverlap, "polynomial arcs overlap at half-height " + std::to_string(eps));
  }

  Table t;
  t.kind = "polynomial";
  t.L = L;
  Piece left = make_arc_piece(PieceKind::EvenPolynomial, {0.0, 0.0}, 0.0, -eps, eps);
  left.coeffs = alpha;
  Piece right = make_arc_piece(PieceKind::EvenPolynomial, {L, 0.0}, kPi, -eps, eps);
  right.coeffs = beta;
  const Piece bottom = make_segment(left.point(eps), right.point(-eps));
  const Piece top = make_segment(right.point(eps), left.point(-eps));
  t.pieces = {left, bottom, right, top};
  t.smooth_after = {false, false, false, false};
  t.vertex_pieces = std::array<int, 2>{0, 2};
  t.vertex_coeffs = std::array<std::vector<double>, 2>{alpha, beta};
  return t;
}

Table make_lemon(double L, double r0, double r1) {
  if (!(L > 0.0) || !(r0 > 0.0) || !(r1 > 0.0)) fail(ErrorCode::InvalidArgument, "lemon needs L, r0, r1 > 0");
  // Each vertex must lie inside the other disk.
  if (!(L < 2.0 * std::min(r0, r1))) {
    fail(ErrorCode::GeometryOverlap, "lemon needs L < 2 min(r0, r1)");
  }
  const double xs = L * (L - 2.0 * r1) / (2.0 * (L - r0 - r1));
  const double ys2 = 2.0 * r0 * xs - xs * xs;
  if (!(xs > 0.0) || !(xs < L) || !(ys2 > 0.0)) {
    fail(ErrorCode::GeometryOverlap, "lemon circles do not bound a two-arc table");
  }
  const double phi0 = std::acos(1.0 - xs / r0);
  const double phi1 = std::acos(1.0 - (L - xs) / r1);

  Table t;
  t.kind = "lemon";
  t.L = L;
  Piece left = make_arc_piece(PieceKind::Ellipse, {0.0, 0.0}, 0.0, -phi0, phi0);
  left.A = left.B = r0;
  Piece right = make_arc_piece(PieceKind::Ellipse, {L, 0.0}, kPi, -phi1, phi1);
  right.A = right.B = r1;
  t.pieces = {left, right};
  t.smooth_after = {false, false};
  t.vertex_pieces = std::array<int, 2>{0, 1};
  return t;
}

namespace {

template <class F>
double panel_integral(F&& f, double t0, double t1) {
  using boost::math::quadrature::gauss;
  // Two fixed rules on a short smooth panel; their gap bounds the error.
  const double v = gauss<double, 30>::integrate(f, t0, t1);
  const double w = gauss<double, 20>::integrate(f, t0, t1);
  if (!(std::abs(v - w) <= 1e-12) || !std::isfinite(v)) {
    fail(ErrorCode::QuadratureFailure, "arclength quadrature did not converge");
  }
  return v;
}

Table make_conic(const std::string& kind, double A, double B) {
  Table t;
  t.kind = kind;
  t.L = 2.0 * B;
  Piece lower = make_arc_piece(PieceKind::Ellipse, {0.0, -B}, 0.5 * kPi, -0.5 * kPi, 0.5 * kPi);
  lower.A = A;
  lower.B = B;
  Piece upper = make_arc_piece(PieceKind::Ellipse, {0.0, B}, -0.5 * kPi, -0.5 * kPi, 0.5 * kPi);
  upper.A = A;
  upper.B = B;
  t.pieces = {lower, upper};
  t.smooth_after = {true, true};
  t.vertex_pieces = std::array<int, 2>{0, 1};
  return t;
}

}  // namespace

Table make_ellipse(double delta) {
  if (!(delta > 0.0)) fail(ErrorCode::InvalidArgument, "ellipse needs delta > 0");
  return make_conic("ellipse", 1.0, delta);
}

Table make_circle(double radius) {
  if (!(radius > 0.0)) fail(ErrorCode::InvalidArgument, "circle needs a positive radius");
  return make_conic("circle", radius, radius);
}

Table build_table(const ArcSpec& left, const ArcSpec& right, double L) {
  using K = ArcSpec::Kind;
  if (left.kind == K::Polynomial && right.kind == K::Polynomial) {
    const double eps = left.epsilon > 0.0 ? left.epsilon : right.epsilon;
    return make_polynomial_table(left.coeffs, right.coeffs, L, eps);
  }
  if (left.kind == K::Circle && right.kind == K::Circle) return make_lemon(L, left.radius, right.radius);
  if (left.kind == K::Ellipse && right.kind == K::Ellipse) {
    if (left.delta != right.delta) fail(ErrorCode::InvalidArgument, "ellipse halves need the same delta");
    if (L > 0.0 && std::abs(L - 2.0 * left.delta) > 1e-12) {
      fail(ErrorCode::InvalidArgument, "ellipse vertex distance is fixed at 2 delta");
    }
    return make_ellipse(left.delta);
  }
  fail(ErrorCode::InvalidArgument, "unsupported combination of arc kinds");
}

ArcChart::ArcChart(const Piece& piece, std::shared_ptr<const Norm> norm, int panels)
    : piece_(piece), norm_(std::move(norm)) {
  if (piece_.kind == PieceKind::Segment) {
    segment_speed_ = norm_->value(piece_.rotate_to_table({0.0, -1.0}));
    s_lo_ = 0.0;
    s_hi_ = segment_speed_ * piece_.tau_hi;
    return;
  }
  if (!(piece_.tau_lo < 0.0 && piece_.tau_hi > 0.0)) {
    fail(ErrorCode::InvalidArgument, "arc parameter range must contain the vertex");
  }
  const int half = std::max(1, panels / 2);
  for (int i = 0; i <= half; ++i) tau_edges_.push_back(piece_.tau_lo * (1.0 - static_cast<double>(i) / half));
  for (int i = 1; i <= half; ++i) tau_edges_.push_back(piece_.tau_hi * static_cast<double>(i) / half);

  s_edges_.assign(tau_edges_.size(), 0.0);
  using boost::math::quadrature::gauss_kronrod;
  auto speed_fn = [this](double t) { return speed(t); };
  for (int i = half - 1; i >= 0; --i) {
    const auto k = static_cast<std::size_t>(i);
    const double piece = panel_integral(speed_fn, tau_edges_[k], tau_edges_[k + 1]);
    s_edges_[k] = s_edges_[k + 1] - piece;
  }
  for (std::size_t k = static_cast<std::size_t>(half); k + 1 < tau_edges_.size(); ++k) {
    const double piece = panel_integral(speed_fn, tau_edges_[k], tau_edges_[k + 1]);
    s_edges_[k + 1] = s_edges_[k] + piece;
  }
  s_lo_ = s_edges_.front();
  s_hi_ = s_edges_.back();
}

double ArcChart::speed(double tau) const { return norm_->value(piece_.derivative(tau, 1)); }

double ArcChart::integrate(double t0, double t1) const {
  if (t0 == t1) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  auto speed_fn = [this](double t) { return speed(t); };
  return gauss_kronrod<double, 15>::integrate(speed_fn, t0, t1, 0);
}

double ArcChart::s_of_tau(double tau) const {
  if (piece_.kind == PieceKind::Segment) return segment_speed_ * tau;
  auto it = std::upper_bound(tau_edges_.begin(), tau_edges_.end(), tau);
  std::size_t k = it == tau_edges_.begin() ? 0 : static_cast<std::size_t>(it - tau_edges_.begin()) - 1;
  k = std::min(k, tau_edges_.size() - 2);
  // Integrate from the nearer edge of the panel.
  if (tau - tau_edges_[k] <= tau_edges_[k + 1] - tau) return s_edges_[k] + integrate(tau_edges_[k], tau);
  return s_edges_[k + 1] - integrate(tau, tau_edges_[k + 1]);
}

double ArcChart::tau_of_s(double s) const {
  if (piece_.kind == PieceKind::Segment) return s / segment_speed_;
  auto it = std::upper_bound(s_edges_.begin(), s_edges_.end(), s);
  std::size_t k = it == s_edges_.begin() ? 0 : static_cast<std::size_t>(it - s_edges_.begin()) - 1;
  k = std::min(k, s_edges_.size() - 2);
  double lo = tau_edges_[k], hi = tau_edges_[k + 1];
  const double w = (s - s_edges_[k]) / (s_edges_[k + 1] - s_edges_[k]);
  double tau = lo + w * (hi - lo);
  if (s < s_lo_ || s > s_hi_) {
    // Slightly outside the chart: Newton without a bracket.
    lo = -std::numeric_limits<double>::infinity();
    hi = std::numeric_limits<double>::infinity();
  }
  for (int it_count = 0; it_count < 30; ++it_count) {
    const double r = s_of_tau(tau) - s;
    if (r == 0.0) break;
    if (r > 0.0) hi = std::min(hi, tau);
    if (r < 0.0) lo = std::max(lo, tau);
    double next = tau - r / speed(tau);
    if (!(next > lo && next < hi) && std::isfinite(lo) && std::isfinite(hi)) next = 0.5 * (lo + hi);
    const double step = next - tau;
    tau = next;
    if (std::abs(step) <= 2e-16 * (1.0 + std::abs(tau))) break;
  }
  return tau;
}

Billiard::Billiard(Table table, std::shared_ptr<const Norm> norm) : table_(std::move(table)), norm_(std::move(norm)) {
  if (!norm_) fail(ErrorCode::InvalidArgument, "billiard needs a norm");
  if (table_.pieces.empty() || table_.smooth_after.size() != table_.pieces.size()) {
    fail(ErrorCode::InvalidArgument, "malformed table");
  }
  charts_.reserve(table_.pieces.size());
  for (const auto& p : table_.pieces) charts_.emplace_back(p, norm_);
}

BoundaryPoint boundary_point(const Billiard& billiard, int piece, double s) {
  if (piece < 0 || piece >= static_cast<int>(billiard.table().size())) {
    fail(ErrorCode::OutOfChart, "piece id " + std::to_string(piece) + " does not exist");
  }
  const ArcChart& chart = billiard.chart(piece);
  if (!chart.contains(s, 1e-12)) {
    fail(ErrorCode::OutOfChart, "s = " + std::to_string(s) + " outside piece " + std::to_string(piece));
  }
  const Piece& p = billiard.piece(piece);
  const double tau = chart.tau_of_s(s);
  const Vec2 d1 = p.derivative(tau, 1);
  BoundaryPoint out{p.point(tau), d1 / billiard.norm().value(d1), false};
  const Table& t = billiard.table();
  const bool at_start = std::abs(s - chart.s_lo()) <= 1e-9 && !t.smooth_after[static_cast<std::size_t>(t.prev(piece))];
  const bool at_end = std::abs(s - chart.s_hi()) <= 1e-9 && !t.smooth_after[static_cast<std::size_t>(piece)];
  out.is_corner = at_start || at_end;
  return out;
}

ArcFrame arc_frame(const Billiard& billiard, int piece, double s) {
  const Piece& p = billiard.piece(piece);
  ArcFrame f;
  f.tau = billiard.chart(piece).tau_of_s(s);
  f.position = p.point(f.tau);
  const Vec2 gt = p.derivative(f.tau, 1);
  const Vec2 gtt = p.derivative(f.tau, 2);
  const double sigma = billiard.norm().value(gt);
  const double dsigma = billiard.norm().gradient(gt)(gtt);
  f.d1 = gt / sigma;
  f.d2 = (gtt - (dsigma / sigma) * gt) / (sigma * sigma);
  return f;
}

CurvatureData euclid_curvature(const Billiard& billiard, int piece, double s) {
  const Piece& p = billiard.piece(piece);
  const ArcChart& chart = billiard.chart(piece);
  auto radius = [&](double ss) {
    const double k = p.curvature(chart.tau_of_s(ss));
    if (!(k > 0.0)) fail(ErrorCode::FlatPoint, "boundary is flat at s = " + std::to_string(ss));
    return 1.0 / k;
  };
  CurvatureData c;
  c.R = radius(s);
  c.kappa = 1.0 / c.R;
  const double h = 1e-3 * c.R;
  auto first = [&](double hh) {
    return (-radius(s + 2 * hh) + 8 * radius(s + hh) - 8 * radius(s - hh) + radius(s - 2 * hh)) / (12 * hh);
  };
  auto second = [&](double hh) {
    return (-radius(s + 2 * hh) + 16 * radius(s + hh) - 30 * c.R + 16 * radius(s - hh) - radius(s - 2 * hh)) /
           (12 * hh * hh);
  };
  c.dR = (16 * first(0.5 * h) - first(h)) / 15;
  c.d2R = (16 * second(0.5 * h) - second(h)) / 15;
  return c;
}

MinkowskiCurvature minkowski_curvature(const Billiard& billiard, int piece, double s) {
  const Norm& F = billiard.norm();
  const ArcFrame f = arc_frame(billiard, piece, s);
  const double kappa_e = billiard.piece(piece).curvature(f.tau);
  if (!(kappa_e > 0.0)) fail(ErrorCode::FlatPoint, "boundary is flat at s = " + std::to_string(s));
  const double theta = std::atan2(f.d1.y, f.d1.x);
  const Vec2 e = unit_vector(theta);
  const Vec2 ep = perp(e);
  const double fe = F.value(e);
  const double r = 1.0 / fe;
  const double dr = -F.gradient(e)(ep) / (fe * fe);
  return {kappa_e * r * r * r, (dr / (r * r)) * e + (1.0 / r) * ep};
}

VertexData vertex_data_numeric(const Billiard& billiard) {
  const Table& t = billiard.table();
  if (!t.vertex_pieces) fail(ErrorCode::InvalidArgument, "table has no axis vertices");
  const auto [p0, p1] = *t.vertex_pieces;
  const CurvatureData c0 = euclid_curvature(billiard, p0, 0.0);
  const CurvatureData c1 = euclid_curvature(billiard, p1, 0.0);
  VertexData v;
  v.L = euclid_norm(billiard.piece(p1).point(0.0) - billiard.piece(p0).point(0.0));
  v.R0 = c0.R;
  v.R0pp = c0.d2R;
  v.R1 = c1.R;
  v.R1pp = c1.d2R;
  return v;
}

VertexData vertex_data(const Billiard& billiard) {
  const Table& t = billiard.table();
  if (!t.vertex_pieces) fail(ErrorCode::InvalidArgument, "table has no axis vertices");
  const auto [p0, p1] = *t.vertex_pieces;
  const Piece& q0 = billiard.piece(p0);
  const Piece& q1 = billiard.piece(p1);
  if (q0.kind == PieceKind::Ellipse && q1.kind == PieceKind::Ellipse) {
    auto conic = [](const Piece& q) {
      return std::array<double, 2>{q.A * q.A / q.B, 3.0 * (q.B * q.B - q.A * q.A) / (q.A * q.A * q.B)};
    };
    const auto r0 = conic(q0);
    const auto r1 = conic(q1);
    return {euclid_norm(q1.point(0.0) - q0.point(0.0)), r0[0], r0[1], r1[0], r1[1]};
  }
  if (!t.vertex_coeffs) return vertex_data_numeric(billiard);
  auto closed = [](const std::vector<double>& c) {
    const double a2 = c.at(0);
    const double a4 = c.size() > 1 ? c[1] : 0.0;
    return std::array<double, 2>{1.0 / (2.0 * a2), 6.0 * a2 - 6.0 * a4 / (a2 * a2)};
  };
  const auto r0 = closed((*t.vertex_coeffs)[0]);
  const auto r1 = closed((*t.vertex_coeffs)[1]);
  return {euclid_norm(billiard.piece(p1).point(0.0) - billiard.piece(p0).point(0.0)), r0[0], r0[1], r1[0], r1[1]};
}

ArcSeries arc_series(const Billiard& billiard, int piece, double s0, int degree) {
  if (degree < 1) fail(ErrorCode::InvalidArgument, "arc series needs degree >= 1");
  const Piece& p = billiard.piece(piece);
  const double tau0 = billiard.chart(piece).tau_of_s(s0);
  const Jet2 tau = Jet2::s_variable(degree, tau0);
  const auto pos = p.point_jet(tau);
  // s - s0 as a series in t = tau - tau0, then reverted.
  const Jet2 speed = billiard.norm().value(derivative_s(pos[0]), derivative_s(pos[1]));
  const Jet2 t_of_s = invert_series(antiderivative_s(speed));
  const Jet2 zero(degree);
  ArcSeries out;
  for (int i = 0; i < 2; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    out.position[ii] = compose(pos[ii], t_of_s, zero);
    out.tangent[ii] = derivative_s(out.position[ii]);
  }
  return out;
}

BoundaryLocation locate(const Billiard& billiard, Vec2 point) {
  BoundaryLocation best;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(billiard.table().size()); ++i) {
    const Piece& p = billiard.piece(i);
    auto dist = [&](double t) {
      const Vec2 d = p.point(t) - point;
      return dot(d, d);
    };
    constexpr int kGrid = 128;
    double t_best = p.tau_lo;
    double d_best = dist(t_best);
    for (int k = 1; k <= kGrid; ++k) {
      const double t = p.tau_lo + (p.tau_hi - p.tau_lo) * k / kGrid;
      if (dist(t) < d_best) {
        d_best = dist(t);
        t_best = t;
      }
    }
    const double h = (p.tau_hi - p.tau_lo) / kGrid;
    const auto r = boost::math::tools::brent_find_minima(dist, std::max(p.tau_lo, t_best - h),
                                                         std::min(p.tau_hi, t_best + h), 52);
    if (r.second < best_d) {
      best_d = r.second;
      best = {i, billiard.chart(i).s_of_tau(r.first)};
    }
  }
  return best;
}

}  // namespace mbill
