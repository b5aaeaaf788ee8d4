#include "mbill/jet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mbill/error.hpp"

namespace mbill {

namespace {

// (j, k) for every flat index up to the maximal capacity.
struct IndexTable {
  std::array<int, Jet2::kCapacity> j{};
  std::array<int, Jet2::kCapacity> k{};
  constexpr IndexTable() {
    std::size_t i = 0;
    for (int n = 0; n <= Jet2::kMaxDegree; ++n) {
      for (int kk = 0; kk <= n; ++kk) {
        j[i] = n - kk;
        k[i] = kk;
        ++i;
      }
    }
  }
};

constexpr IndexTable kIndex{};

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void check_degree(int degree) {
  if (degree < 0 || degree > Jet2::kMaxDegree) {
    fail(ErrorCode::InvalidArgument, "jet degree " + std::to_string(degree) + " out of range");
  }
}

}  // namespace

Jet2::Jet2(int degree, double constant) : degree_(degree) {
  check_degree(degree);
  c_[0] = constant;
}

Jet2 Jet2::s_variable(int degree, double base) {
  Jet2 x(degree, base);
  if (degree >= 1) x.c_[index(1, 0)] = 1.0;
  return x;
}

Jet2 Jet2::u_variable(int degree, double base) {
  Jet2 x(degree, base);
  if (degree >= 1) x.c_[index(0, 1)] = 1.0;
  return x;
}

double Jet2::operator()(int j, int k) const noexcept {
  if (j < 0 || k < 0 || j + k > degree_) return 0.0;
  return c_[index(j, k)];
}

double& Jet2::at(int j, int k) {
  if (j < 0 || k < 0 || j + k > degree_) {
    fail(ErrorCode::InvalidArgument, "jet coefficient index above degree");
  }
  return c_[index(j, k)];
}

double Jet2::derivative(int j, int k) const noexcept {
  return (*this)(j, k) * factorial(j) * factorial(k);
}

double Jet2::evaluate(double ds, double du) const noexcept {
  double total = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    total += c_[i] * std::pow(ds, kIndex.j[i]) * std::pow(du, kIndex.k[i]);
  }
  return total;
}

Jet2 Jet2::truncated(int degree) const {
  Jet2 r(std::min(degree, degree_));
  std::copy_n(c_.begin(), r.size(), r.c_.begin());
  return r;
}

Jet2 Jet2::without_constant() const {
  Jet2 r = *this;
  r.c_[0] = 0.0;
  return r;
}

Jet2& Jet2::operator+=(const Jet2& o) {
  degree_ = std::min(degree_, o.degree_);
  for (std::size_t i = 0; i < size(); ++i) c_[i] += o.c_[i];
  std::fill(c_.begin() + static_cast<std::ptrdiff_t>(size()), c_.end(), 0.0);
  return *this;
}

Jet2& Jet2::operator-=(const Jet2& o) {
  degree_ = std::min(degree_, o.degree_);
  for (std::size_t i = 0; i < size(); ++i) c_[i] -= o.c_[i];
  std::fill(c_.begin() + static_cast<std::ptrdiff_t>(size()), c_.end(), 0.0);
  return *this;
}

Jet2& Jet2::operator*=(const Jet2& o) {
  *this = *this * o;
  return *this;
}

Jet2& Jet2::operator/=(const Jet2& o) {
  *this = *this * reciprocal(o);
  return *this;
}

Jet2& Jet2::operator*=(double c) noexcept {
  for (std::size_t i = 0; i < size(); ++i) c_[i] *= c;
  return *this;
}

Jet2 Jet2::operator-() const {
  Jet2 r = *this;
  r *= -1.0;
  return r;
}

Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }

Jet2 operator*(const Jet2& a, const Jet2& b) {
  const int d = std::min(a.degree(), b.degree());
  Jet2 r(d);
  const std::size_t n = Jet2::size_for(d);
  const double* ac = a.data();
  const double* bc = b.data();
  for (std::size_t i = 0; i < n; ++i) {
    if (ac[i] == 0.0) continue;
    const int ji = kIndex.j[i];
    const int ki = kIndex.k[i];
    const int remaining = d - ji - ki;
    for (std::size_t m = 0; m < Jet2::size_for(remaining); ++m) {
      r.at(ji + kIndex.j[m], ki + kIndex.k[m]) += ac[i] * bc[m];
    }
  }
  return r;
}

Jet2 operator/(const Jet2& a, const Jet2& b) { return a * reciprocal(b); }
Jet2 operator+(Jet2 a, double c) { return a += c; }
Jet2 operator+(double c, Jet2 a) { return a += c; }
Jet2 operator-(Jet2 a, double c) { return a -= c; }
Jet2 operator-(double c, const Jet2& a) { return (-a) += c; }
Jet2 operator*(Jet2 a, double c) { return a *= c; }
Jet2 operator*(double c, Jet2 a) { return a *= c; }
Jet2 operator/(Jet2 a, double c) { return a /= c; }
Jet2 operator/(double c, const Jet2& a) { return c * reciprocal(a); }

Jet2 apply_taylor(const Jet2& x, std::span<const double> taylor) {
  const int d = x.degree();
  const Jet2 h = x.without_constant();
  // Horner in the nilpotent part h.
  const int top = std::min<int>(d, static_cast<int>(taylor.size()) - 1);
  Jet2 r(d, top >= 0 ? taylor[static_cast<std::size_t>(top)] : 0.0);
  for (int n = top - 1; n >= 0; --n) {
    r = r * h;
    r += taylor[static_cast<std::size_t>(n)];
  }
  return r;
}

Jet2 reciprocal(const Jet2& x) {
  const double c = x.constant_term();
  if (c == 0.0) fail(ErrorCode::InvalidArgument, "reciprocal of a jet with zero constant term");
  std::array<double, Jet2::kMaxDegree + 1> t{};
  double p = 1.0 / c;
  for (int n = 0; n <= x.degree(); ++n) {
    t[static_cast<std::size_t>(n)] = p;
    p *= -1.0 / c;
  }
  return apply_taylor(x, std::span<const double>(t.data(), static_cast<std::size_t>(x.degree() + 1)));
}

Jet2 pow(const Jet2& x, double p) {
  const double c = x.constant_term();
  if (!(c > 0.0)) fail(ErrorCode::InvalidArgument, "fractional power of a jet needs a positive constant term");
  std::array<double, Jet2::kMaxDegree + 1> t{};
  double binom = 1.0;
  for (int n = 0; n <= x.degree(); ++n) {
    t[static_cast<std::size_t>(n)] = binom * std::pow(c, p - n);
    binom *= (p - n) / (n + 1);
  }
  return apply_taylor(x, std::span<const double>(t.data(), static_cast<std::size_t>(x.degree() + 1)));
}

Jet2 sqrt(const Jet2& x) { return pow(x, 0.5); }

Jet2 ipow(const Jet2& x, int n) {
  if (n < 0) return reciprocal(ipow(x, -n));
  Jet2 r(x.degree(), 1.0);
  Jet2 base = x;
  while (n > 0) {
    if (n & 1) r = r * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return r;
}

Jet2 sin(const Jet2& x) {
  const double s = std::sin(x.constant_term());
  const double c = std::cos(x.constant_term());
  const std::array<double, 4> cycle{s, c, -s, -c};
  std::array<double, Jet2::kMaxDegree + 1> t{};
  for (int n = 0; n <= x.degree(); ++n) t[static_cast<std::size_t>(n)] = cycle[static_cast<std::size_t>(n % 4)] / factorial(n);
  return apply_taylor(x, std::span<const double>(t.data(), static_cast<std::size_t>(x.degree() + 1)));
}

Jet2 cos(const Jet2& x) {
  const double s = std::sin(x.constant_term());
  const double c = std::cos(x.constant_term());
  const std::array<double, 4> cycle{c, -s, -c, s};
  std::array<double, Jet2::kMaxDegree + 1> t{};
  for (int n = 0; n <= x.degree(); ++n) t[static_cast<std::size_t>(n)] = cycle[static_cast<std::size_t>(n % 4)] / factorial(n);
  return apply_taylor(x, std::span<const double>(t.data(), static_cast<std::size_t>(x.degree() + 1)));
}

Jet2 exp(const Jet2& x) {
  const double e = std::exp(x.constant_term());
  std::array<double, Jet2::kMaxDegree + 1> t{};
  for (int n = 0; n <= x.degree(); ++n) t[static_cast<std::size_t>(n)] = e / factorial(n);
  return apply_taylor(x, std::span<const double>(t.data(), static_cast<std::size_t>(x.degree() + 1)));
}

Jet2 log(const Jet2& x) {
  const double c = x.constant_term();
  if (!(c > 0.0)) fail(ErrorCode::InvalidArgument, "log of a jet needs a positive constant term");
  std::array<double, Jet2::kMaxDegree + 1> t{};
  t[0] = std::log(c);
  for (int n = 1; n <= x.degree(); ++n) {
    t[static_cast<std::size_t>(n)] = ((n % 2 == 1) ? 1.0 : -1.0) / (n * std::pow(c, n));
  }
  return apply_taylor(x, std::span<const double>(t.data(), static_cast<std::size_t>(x.degree() + 1)));
}

Jet2 compose(const Jet2& f, const Jet2& s_sub, const Jet2& u_sub) {
  if (s_sub.constant_term() != 0.0 || u_sub.constant_term() != 0.0) {
    fail(ErrorCode::InvalidArgument, "compose needs substitutes without constant term");
  }
  const int d = std::min({f.degree(), s_sub.degree(), u_sub.degree()});
  std::array<Jet2, Jet2::kMaxDegree + 1> sp{};
  std::array<Jet2, Jet2::kMaxDegree + 1> up{};
  sp[0] = Jet2(d, 1.0);
  up[0] = Jet2(d, 1.0);
  for (int n = 1; n <= d; ++n) {
    sp[static_cast<std::size_t>(n)] = sp[static_cast<std::size_t>(n - 1)] * s_sub.truncated(d);
    up[static_cast<std::size_t>(n)] = up[static_cast<std::size_t>(n - 1)] * u_sub.truncated(d);
  }
  Jet2 r(d);
  for (std::size_t i = 0; i < Jet2::size_for(d); ++i) {
    const double c = f.data()[i];
    if (c == 0.0) continue;
    r += c * (sp[static_cast<std::size_t>(kIndex.j[i])] * up[static_cast<std::size_t>(kIndex.k[i])]);
  }
  return r;
}

Jet2 derivative_s(const Jet2& x) {
  const int d = std::max(0, x.degree() - 1);
  Jet2 r(d);
  if (x.degree() == 0) return r;
  for (int n = 0; n <= d; ++n) {
    for (int k = 0; k <= n; ++k) {
      const int j = n - k;
      r.at(j, k) = (j + 1) * x(j + 1, k);
    }
  }
  return r;
}

Jet2 derivative_u(const Jet2& x) {
  const int d = std::max(0, x.degree() - 1);
  Jet2 r(d);
  if (x.degree() == 0) return r;
  for (int n = 0; n <= d; ++n) {
    for (int k = 0; k <= n; ++k) {
      const int j = n - k;
      r.at(j, k) = (k + 1) * x(j, k + 1);
    }
  }
  return r;
}

Jet2 antiderivative_s(const Jet2& x) {
  const int d = std::min(x.degree() + 1, Jet2::kMaxDegree);
  Jet2 r(d);
  for (int n = 1; n <= d; ++n) {
    for (int k = 0; k < n; ++k) {
      const int j = n - k;
      r.at(j, k) = x(j - 1, k) / j;
    }
  }
  return r;
}

double max_abs_coefficient(const Jet2& x, int min_degree) {
  double m = 0.0;
  for (std::size_t i = Jet2::size_for(min_degree - 1 < 0 ? -1 : min_degree - 1); i < x.size(); ++i) {
    m = std::max(m, std::abs(x.data()[i]));
  }
  if (min_degree <= 0) m = std::max(m, std::abs(x.constant_term()));
  return m;
}

ImplicitSolveResult implicit_jet_solve(const std::function<Jet2(const Jet2&)>& residual,
                                       double seed, int degree, double slope,
                                       bool slope_is_exact) {
  auto scalar = [&](double y) { return residual(Jet2(degree, y)).constant_term(); };
  auto estimate_slope = [&](double y) {
    const double h = 1e-6 * (1.0 + std::abs(y));
    return (scalar(y - 2 * h) - 8 * scalar(y - h) + 8 * scalar(y + h) - scalar(y + 2 * h)) / (12 * h);
  };

  double y0 = seed;
  if (!slope_is_exact) slope = estimate_slope(y0);
  if (!(std::abs(slope) > 1e-300) || !std::isfinite(slope)) {
    fail(ErrorCode::SingularImplicit, "residual has zero derivative in the unknown at the seed");
  }
  for (int it = 0; it < 60; ++it) {
    if (!slope_is_exact && it > 0) slope = estimate_slope(y0);
    if (!(std::abs(slope) > 1e-300) || !std::isfinite(slope)) {
      fail(ErrorCode::SingularImplicit, "residual derivative vanished during the scalar solve");
    }
    const double step = scalar(y0) / slope;
    y0 -= step;
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(y0))) break;
  }
  if (!slope_is_exact) slope = estimate_slope(y0);
  if (std::abs(slope) < 1e-14) {
    fail(ErrorCode::SingularImplicit, "residual has zero derivative in the unknown at the solution");
  }

  ImplicitSolveResult out{Jet2(degree, y0), 0, 0.0};
  const int max_sweeps = slope_is_exact ? degree + 2 : 4 * (degree + 2);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    Jet2 r = residual(out.solution);
    out.residual = max_abs_coefficient(r);
    if (out.residual == 0.0) break;
    Jet2 step = r / slope;
    out.solution -= step;
    ++out.sweeps;
    if (max_abs_coefficient(step) <= 1e-17 * (1.0 + max_abs_coefficient(out.solution))) break;
  }
  out.residual = max_abs_coefficient(residual(out.solution));
  return out;
}

Jet2 invert_series(const Jet2& f) {
  const int d = f.degree();
  const double slope = f(1, 0);
  if (slope == 0.0) fail(ErrorCode::SingularImplicit, "series with vanishing linear term is not invertible");
  const Jet2 zero(d);
  const Jet2 target = Jet2::s_variable(d);
  const Jet2 f0 = f.without_constant();
  auto residual = [&](const Jet2& t) { return compose(f0, t.without_constant(), zero) + t.constant_term() * slope - target; };
  return implicit_jet_solve(residual, 0.0, d, slope, true).solution;
}

}  // namespace mbill
