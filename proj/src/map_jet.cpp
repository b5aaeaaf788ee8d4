#include "mbill/map_jet.hpp"

#include <cmath>
#include <string>

namespace mbill {

namespace {

// p(y) for a univariate series p in ds; y may carry a constant term.
Jet2 horner(const Jet2& p, const Jet2& y) {
  Jet2 r(y.degree(), p(p.degree(), 0));
  for (int n = p.degree() - 1; n >= 0; --n) r = r * y + p(n, 0);
  return r;
}

}  // namespace

MapJet step_jet(const Billiard& billiard, const PhasePointSU& base, int degree) {
  if (degree < 1 || degree + 1 > Jet2::kMaxDegree) fail(ErrorCode::InvalidArgument, "unsupported jet degree");
  const Norm& F = billiard.norm();
  const PhasePointSU image = step_su(billiard, base);

  const ArcSeries g0 = arc_series(billiard, base.piece, base.s, degree + 1);
  const ArcSeries g1 = arc_series(billiard, image.piece, image.s, degree + 1);
  const Jet2 x0 = g0.position[0].truncated(degree), y0 = g0.position[1].truncated(degree);
  const Jet2 tx0 = g0.tangent[0].truncated(degree), ty0 = g0.tangent[1].truncated(degree);
  const Jet2 u_in = Jet2::u_variable(degree, base.u);

  // Chord vector as a jet once ds1 is known.
  auto chord = [&](const Jet2& ds1) {
    return std::array<Jet2, 2>{horner(g1.position[0], ds1) - x0, horner(g1.position[1], ds1) - y0};
  };
  auto residual = [&](const Jet2& ds1) {
    const auto v = chord(ds1);
    const auto g = F.gradient(v[0], v[1]);
    return -(g[0] * tx0 + g[1] * ty0) - u_in;
  };

  const BoundaryPoint p0 = boundary_point(billiard, base.piece, base.s);
  const BoundaryPoint p1 = boundary_point(billiard, image.piece, image.s);
  const double slope = -F.hessian(p1.position - p0.position).bilinear(p0.tangent, p1.tangent);
  const ImplicitSolveResult solved = implicit_jet_solve(residual, 0.0, degree, slope, true);

  const auto v = chord(solved.solution);
  const auto g = F.gradient(v[0], v[1]);
  const Jet2 tx1 = horner(g1.tangent[0], solved.solution), ty1 = horner(g1.tangent[1], solved.solution);
  MapJet out;
  out.s1 = solved.solution + image.s;
  out.u1 = -(g[0] * tx1 + g[1] * ty1);
  out.base = base;
  out.image = image;
  return out;
}

MapJet map_jet(const Billiard& billiard, int degree) {
  const Table& t = billiard.table();
  if (!t.vertex_pieces) fail(ErrorCode::InvalidArgument, "table has no axis 2-orbit");
  MapJet mj = step_jet(billiard, {(*t.vertex_pieces)[0], 0.0, 0.0}, degree);
  for (int k = 0; k <= 2 && degree >= 2; ++k) {
    const double cs = mj.s1(2 - k, k), cu = mj.u1(2 - k, k);
    if (std::abs(cs) > 1e-7 || std::abs(cu) > 1e-7) {
      fail(ErrorCode::SecondOrderNonzero, "quadratic coefficient (" + std::to_string(2 - k) + "," +
                                              std::to_string(k) + ") of the vertex jet is not zero");
    }
  }
  return mj;
}

MapJet two_step_jet(const Billiard& billiard, int degree) {
  const Table& t = billiard.table();
  if (!t.vertex_pieces) fail(ErrorCode::InvalidArgument, "table has no axis 2-orbit");
  const MapJet first = step_jet(billiard, {(*t.vertex_pieces)[0], 0.0, 0.0}, degree);
  const MapJet second = step_jet(billiard, first.image, degree);
  return compose_map_jets(first, second);
}

MapJet compose_map_jets(const MapJet& first, const MapJet& second) {
  const double tol = 1e-9;
  if (first.image.piece != second.base.piece || std::abs(first.image.s - second.base.s) > tol ||
      std::abs(first.image.u - second.base.u) > tol) {
    fail(ErrorCode::InvalidArgument, "jets do not chain: image of the first is not the base of the second");
  }
  const Jet2 ds = first.s1 - second.base.s;
  const Jet2 du = first.u1 - second.base.u;
  const Jet2 ds0 = ds.without_constant(), du0 = du.without_constant();
  MapJet out;
  out.s1 = compose(second.s1, ds0, du0);
  out.u1 = compose(second.u1, ds0, du0);
  out.base = first.base;
  out.image = second.image;
  return out;
}

MapJet identity_jet(const PhasePointSU& base, int degree) {
  return {Jet2::s_variable(degree, base.s), Jet2::u_variable(degree, base.u), base, base};
}

}  // namespace mbill
