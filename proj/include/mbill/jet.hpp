#pragma once

// Truncated bivariate Taylor arithmetic.
//
// A Jet2 holds the coefficients c_jk of  sum c_jk ds^j du^k  for j + k <= degree.
// Products and compositions drop every term above the jet's degree, so the
// coefficients are exactly those of the truncated Taylor expansion of the
// result.  Univariate series are Jet2 values that only use the ds variable.

#include <array>
#include <cstddef>
#include <functional>
#include <span>

namespace mbill {

class Jet2 {
 public:
  static constexpr int kMaxDegree = 7;
  static constexpr std::size_t kCapacity = (kMaxDegree + 1) * (kMaxDegree + 2) / 2;

  Jet2() : Jet2(3) {}
  explicit Jet2(int degree, double constant = 0.0);

  /// base + ds
  static Jet2 s_variable(int degree, double base = 0.0);
  /// base + du
  static Jet2 u_variable(int degree, double base = 0.0);

  int degree() const noexcept { return degree_; }
  std::size_t size() const noexcept { return size_for(degree_); }

  /// Coefficient of ds^j du^k; zero above the degree.
  double operator()(int j, int k) const noexcept;
  double& at(int j, int k);

  double constant_term() const noexcept { return c_[0]; }
  void set_constant(double c) noexcept { c_[0] = c; }

  /// Partial derivative d^{j+k}/ds^j du^k at the expansion point.
  double derivative(int j, int k) const noexcept;

  double evaluate(double ds, double du) const noexcept;
  Jet2 truncated(int degree) const;
  Jet2 without_constant() const;

  Jet2& operator+=(const Jet2& o);
  Jet2& operator-=(const Jet2& o);
  Jet2& operator*=(const Jet2& o);
  Jet2& operator/=(const Jet2& o);
  Jet2& operator+=(double c) noexcept { c_[0] += c; return *this; }
  Jet2& operator-=(double c) noexcept { c_[0] -= c; return *this; }
  Jet2& operator*=(double c) noexcept;
  Jet2& operator/=(double c) noexcept { return *this *= 1.0 / c; }

  Jet2 operator-() const;

  static constexpr std::size_t size_for(int degree) noexcept {
    return static_cast<std::size_t>((degree + 1) * (degree + 2) / 2);
  }
  static constexpr std::size_t index(int j, int k) noexcept {
    const int n = j + k;
    return static_cast<std::size_t>(n * (n + 1) / 2 + k);
  }

  const double* data() const noexcept { return c_.data(); }

 private:
  int degree_;
  std::array<double, kCapacity> c_{};
};

Jet2 operator+(Jet2 a, const Jet2& b);
Jet2 operator-(Jet2 a, const Jet2& b);
Jet2 operator*(const Jet2& a, const Jet2& b);
Jet2 operator/(const Jet2& a, const Jet2& b);
Jet2 operator+(Jet2 a, double c);
Jet2 operator+(double c, Jet2 a);
Jet2 operator-(Jet2 a, double c);
Jet2 operator-(double c, const Jet2& a);
Jet2 operator*(Jet2 a, double c);
Jet2 operator*(double c, Jet2 a);
Jet2 operator/(Jet2 a, double c);
Jet2 operator/(double c, const Jet2& a);

/// f(x0 + h) = sum_n taylor[n] h^n, with h the non-constant part of x.
Jet2 apply_taylor(const Jet2& x, std::span<const double> taylor);

Jet2 reciprocal(const Jet2& x);
Jet2 sqrt(const Jet2& x);
Jet2 pow(const Jet2& x, double p);
Jet2 ipow(const Jet2& x, int n);
Jet2 sin(const Jet2& x);
Jet2 cos(const Jet2& x);
Jet2 exp(const Jet2& x);
Jet2 log(const Jet2& x);

/// Substitutes ds -> s_sub and du -> u_sub.  Both substitutes must have a
/// zero constant term (the truncation is otherwise not exact).
Jet2 compose(const Jet2& f, const Jet2& s_sub, const Jet2& u_sub);

Jet2 derivative_s(const Jet2& x);
Jet2 derivative_u(const Jet2& x);
/// Antiderivative in ds with zero constant; the degree grows by one.
Jet2 antiderivative_s(const Jet2& x);

double max_abs_coefficient(const Jet2& x, int min_degree = 0);

/// Jet of the unknown y solving residual(y) == 0 through the jet degree.
///
/// Newton sweeps in jet space: y <- y - residual(y) / slope.  The constant
/// term is polished first by scalar Newton on the residual's constant term.
/// When `slope` is the exact derivative of the residual in the unknown at the
/// solution each sweep fixes one more degree; when it is omitted it is
/// estimated by central differences and extra sweeps absorb the error.
struct ImplicitSolveResult {
  Jet2 solution;
  int sweeps = 0;
  double residual = 0.0;
};

ImplicitSolveResult implicit_jet_solve(const std::function<Jet2(const Jet2&)>& residual,
                                       double seed, int degree,
                                       double slope = 0.0, bool slope_is_exact = false);

/// Reverts a univariate series s = f(t) with f(0) = 0, f'(0) != 0, returning
/// t as a series in s to the same degree.
Jet2 invert_series(const Jet2& f);

}  // namespace mbill
