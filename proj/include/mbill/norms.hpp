#pragma once

#include <array>
#include <cmath>
#include <memory>

#include "mbill/jet.hpp"

namespace mbill {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(Vec2 o) noexcept { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) noexcept { x -= o.x; y -= o.y; return *this; }
  Vec2& operator*=(double c) noexcept { x *= c; y *= c; return *this; }
};

inline Vec2 operator+(Vec2 a, Vec2 b) noexcept { return a += b; }
inline Vec2 operator-(Vec2 a, Vec2 b) noexcept { return a -= b; }
inline Vec2 operator-(Vec2 a) noexcept { return {-a.x, -a.y}; }
inline Vec2 operator*(double c, Vec2 a) noexcept { return a *= c; }
inline Vec2 operator*(Vec2 a, double c) noexcept { return a *= c; }
inline Vec2 operator/(Vec2 a, double c) noexcept { return a *= 1.0 / c; }

inline double dot(Vec2 a, Vec2 b) noexcept { return a.x * b.x + a.y * b.y; }
/// Standard determinant form [a, b].
inline double cross(Vec2 a, Vec2 b) noexcept { return a.x * b.y - a.y * b.x; }
inline double euclid_norm(Vec2 a) noexcept { return std::hypot(a.x, a.y); }
inline Vec2 perp(Vec2 a) noexcept { return {-a.y, a.x}; }
inline Vec2 rotate(Vec2 a, double angle) noexcept {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}
inline Vec2 unit_vector(double angle) noexcept { return {std::cos(angle), std::sin(angle)}; }

/// Linear functional on Vec2.
struct Covec2 {
  double x = 0.0;
  double y = 0.0;

  double operator()(Vec2 v) const noexcept { return x * v.x + y * v.y; }
};

inline Covec2 operator-(Covec2 a, Covec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }

struct Sym2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  Vec2 apply(Vec2 v) const noexcept { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
  double bilinear(Vec2 v, Vec2 w) const noexcept { return dot(v, apply(w)); }
  double det() const noexcept { return xx * yy - xy * xy; }
  double trace() const noexcept { return xx + yy; }
  /// Eigenvalues in increasing order.
  std::array<double, 2> eigenvalues() const noexcept;
};

/// A Minkowski norm on the plane with exact first and second derivatives.
///
/// The jet overloads lift the same expressions to truncated Taylor
/// arithmetic; they are used by the map-jet construction.
class Norm {
 public:
  virtual ~Norm() = default;

  virtual double value(Vec2 v) const = 0;
  virtual Covec2 gradient(Vec2 v) const = 0;
  virtual Sym2 hessian(Vec2 v) const = 0;

  virtual Jet2 value(const Jet2& vx, const Jet2& vy) const = 0;
  virtual std::array<Jet2, 2> gradient(const Jet2& vx, const Jet2& vy) const = 0;

  /// F(-v) == F(v).
  virtual bool is_reversible() const { return true; }
};

/// F(v) = a |v|_2 + b |v|_{2k}
class MixedNorm final : public Norm {
 public:
  MixedNorm(double a, double b, int k = 2);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  int k() const noexcept { return k_; }

  double value(Vec2 v) const override;
  Covec2 gradient(Vec2 v) const override;
  Sym2 hessian(Vec2 v) const override;
  Jet2 value(const Jet2& vx, const Jet2& vy) const override;
  std::array<Jet2, 2> gradient(const Jet2& vx, const Jet2& vy) const override;

  /// Norm F_{a, 1-a, 4} used by the vertex twist analysis.
  static MixedNorm standard(double a) { return MixedNorm(a, 1.0 - a, 2); }

 private:
  double a_;
  double b_;
  int k_;
};

using NormSpec = MixedNorm;

double eval(const Norm& norm, Vec2 v);
Covec2 grad(const Norm& norm, Vec2 v);
Sym2 hess(const Norm& norm, Vec2 v);

/// Hessian of F^2 / 2.
Sym2 fundamental_tensor(const Norm& norm, Vec2 v);

/// r(theta) with F(r(theta) (cos theta, sin theta)) = 1.
double indicatrix_radius(const Norm& norm, double theta);

/// Covector p = dF(u) for a unit vector u; p(u) = 1 and p vanishes on T_u I.
Covec2 legendre(const Norm& norm, Vec2 u, double tol = 1e-9);

/// sup over unit w of |[w, v]|.
double antinorm(const Norm& norm, Vec2 v);

/// v is Birkhoff orthogonal to w.
bool birkhoff_orthogonal(const Norm& norm, Vec2 v, Vec2 w, double tol = 1e-12);

}  // namespace mbill
