#include "mbill/norms.hpp"

#include <boost/math/tools/minima.hpp>
#include <numbers>
#include <string>

#include "mbill/error.hpp"

namespace mbill {

namespace {

void require_nonzero(Vec2 v) {
  if (v.x == 0.0 && v.y == 0.0) fail(ErrorCode::ZeroVector, "norm derivative requested at the zero vector");
}

}  // namespace

std::array<double, 2> Sym2::eigenvalues() const noexcept {
  const double m = 0.5 * (xx + yy);
  const double r = std::hypot(0.5 * (xx - yy), xy);
  return {m - r, m + r};
}

MixedNorm::MixedNorm(double a, double b, int k) : a_(a), b_(b), k_(k) {
  if (!(a > 0.0) || !(b >= 0.0) || k < 1 || !std::isfinite(a) || !std::isfinite(b)) {
    fail(ErrorCode::InvalidArgument, "mixed norm needs a > 0, b >= 0, k >= 1");
  }
}

double MixedNorm::value(Vec2 v) const {
  require_nonzero(v);
  const double e = euclid_norm(v);
  if (b_ == 0.0) return a_ * e;
  // Scale by the Euclidean length so the 2k-th powers cannot overflow.
  const double x = v.x / e, y = v.y / e;
  const double p = std::pow(x, 2 * k_) + std::pow(y, 2 * k_);
  return e * (a_ + b_ * std::pow(p, 1.0 / (2 * k_)));
}

Covec2 MixedNorm::gradient(Vec2 v) const {
  require_nonzero(v);
  const double e = euclid_norm(v);
  const double x = v.x / e, y = v.y / e;
  Covec2 g{a_ * x, a_ * y};
  if (b_ != 0.0) {
    const int m = 2 * k_;
    const double p = std::pow(x, m) + std::pow(y, m);
    const double f = b_ * std::pow(p, 1.0 / m - 1.0);
    g.x += f * std::pow(x, m - 1);
    g.y += f * std::pow(y, m - 1);
  }
  return g;
}

Sym2 MixedNorm::hessian(Vec2 v) const {
  require_nonzero(v);
  const double e = euclid_norm(v);
  const double x = v.x / e, y = v.y / e;
  // Degree -1 homogeneous: evaluate on the unit circle and rescale.
  const double alpha = a_;
  Sym2 h{alpha * y * y, -alpha * x * y, alpha * x * x};
  if (b_ != 0.0) {
    const int m = 2 * k_;
    const double p = std::pow(x, m) + std::pow(y, m);
    const double beta = b_ * std::pow(p, 1.0 / m - 2.0);
    const double c = (m - 1) * beta;
    h.xx += c * std::pow(x, m - 2) * std::pow(y, m);
    h.yy += c * std::pow(x, m) * std::pow(y, m - 2);
    h.xy -= c * std::pow(x * y, m - 1);
  }
  h.xx /= e;
  h.xy /= e;
  h.yy /= e;
  return h;
}

Jet2 MixedNorm::value(const Jet2& vx, const Jet2& vy) const {
  require_nonzero({vx.constant_term(), vy.constant_term()});
  Jet2 f = a_ * sqrt(vx * vx + vy * vy);
  if (b_ != 0.0) {
    const int m = 2 * k_;
    f += b_ * pow(ipow(vx, m) + ipow(vy, m), 1.0 / m);
  }
  return f;
}

std::array<Jet2, 2> MixedNorm::gradient(const Jet2& vx, const Jet2& vy) const {
  require_nonzero({vx.constant_term(), vy.constant_term()});
  const Jet2 inv = a_ * pow(vx * vx + vy * vy, -0.5);
  std::array<Jet2, 2> g{vx * inv, vy * inv};
  if (b_ != 0.0) {
    const int m = 2 * k_;
    const Jet2 f = b_ * pow(ipow(vx, m) + ipow(vy, m), 1.0 / m - 1.0);
    g[0] += ipow(vx, m - 1) * f;
    g[1] += ipow(vy, m - 1) * f;
  }
  return g;
}

double eval(const Norm& norm, Vec2 v) { return norm.value(v); }
Covec2 grad(const Norm& norm, Vec2 v) { return norm.gradient(v); }
Sym2 hess(const Norm& norm, Vec2 v) { return norm.hessian(v); }

Sym2 fundamental_tensor(const Norm& norm, Vec2 v) {
  const double f = norm.value(v);
  const Covec2 g = norm.gradient(v);
  const Sym2 h = norm.hessian(v);
  return {g.x * g.x + f * h.xx, g.x * g.y + f * h.xy, g.y * g.y + f * h.yy};
}

double indicatrix_radius(const Norm& norm, double theta) {
  return 1.0 / norm.value(unit_vector(theta));
}

Covec2 legendre(const Norm& norm, Vec2 u, double tol) {
  const double f = norm.value(u);
  if (std::abs(f - 1.0) > tol) {
    fail(ErrorCode::NotUnit, "legendre transform needs a unit vector, got F(u) = " + std::to_string(f));
  }
  return norm.gradient(u);
}

double antinorm(const Norm& norm, Vec2 v) {
  require_nonzero(v);
  constexpr int kGrid = 720;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  auto objective = [&](double t) { return -std::abs(cross(indicatrix_radius(norm, t) * unit_vector(t), v)); };

  int best = 0;
  double best_val = objective(0.0);
  for (int i = 1; i < kGrid; ++i) {
    const double val = objective(kTwoPi * i / kGrid);
    if (val < best_val) {
      best_val = val;
      best = i;
    }
  }
  const double h = kTwoPi / kGrid;
  const double t0 = kTwoPi * best / kGrid;
  // 40 bits puts the argument within ~1e-12 of the maximizer.
  const auto r = boost::math::tools::brent_find_minima(objective, t0 - h, t0 + h, 40);
  return -std::min(r.second, best_val);
}

bool birkhoff_orthogonal(const Norm& norm, Vec2 v, Vec2 w, double tol) {
  return std::abs(norm.gradient(v)(w)) <= tol * euclid_norm(w);
}

}  // namespace mbill
