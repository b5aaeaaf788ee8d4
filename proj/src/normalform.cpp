#include "mbill/normalform.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace mbill {

namespace {

constexpr double kParabolicTol = 1e-9;
constexpr double kResonanceTol = 1e-9;

bool near(double x, double y, double tol) { return std::abs(x - y) <= tol * std::max(1.0, std::abs(y)); }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string_view to_string(LinearClass c) noexcept {
  switch (c) {
    case LinearClass::Elliptic: return "Elliptic";
    case LinearClass::Parabolic: return "Parabolic";
    case LinearClass::Hyperbolic: return "Hyperbolic";
  }
  return "?";
}

std::string_view to_string(NonresonanceCondition c) noexcept {
  switch (c) {
    case NonresonanceCondition::Generic: return "generic";
    case NonresonanceCondition::A: return "A";
    case NonresonanceCondition::B: return "B";
  }
  return "?";
}

std::string_view to_string(MoserVerdict v) noexcept {
  switch (v) {
    case MoserVerdict::Yes: return "Yes";
    case MoserVerdict::UnknownResonant: return "Unknown-resonant";
    case MoserVerdict::UnknownZeroTwist: return "Unknown-zero-twist";
    case MoserVerdict::NoHyperbolic: return "No-hyperbolic";
    case MoserVerdict::NoParabolic: return "No-parabolic";
  }
  return "?";
}

StabilityClass classify(const Mat2& M) {
  const double det = M.det();
  if (!(std::abs(det - 1.0) <= 1e-6)) fail(ErrorCode::InvalidArgument, "det M = " + fmt(det) + ", expected 1");
  StabilityClass out;
  out.trace = M.trace();
  const double half = 0.5 * out.trace;
  const double gap = std::abs(out.trace) - 2.0;
  if (std::abs(gap) <= kParabolicTol) {
    out.kind = LinearClass::Parabolic;
    out.lambda = {half > 0 ? 1.0 : -1.0, 0.0};
  } else if (gap < 0) {
    out.kind = LinearClass::Elliptic;
    out.lambda = {half, std::sqrt(1.0 - half * half)};
  } else {
    out.kind = LinearClass::Hyperbolic;
    const double r = std::sqrt(half * half - 1.0);
    out.lambda = {half > 0 ? half + r : half - r, 0.0};
  }
  return out;
}

NonresonanceResult check_nonresonance(const Mat2& M, const ResonanceContext& context) {
  const double t = M.trace();
  NonresonanceResult out;
  if (std::abs(t) <= kResonanceTol) {
    out = {false, NonresonanceCondition::Generic, "trace 0: lambda^4 = 1"};
  } else if (std::abs(std::abs(t) - 2.0) <= kResonanceTol) {
    out = {false, NonresonanceCondition::Generic, "trace +-2: lambda^2 = 1"};
  }
  const double a = context.a, L = context.L;
  switch (context.kind) {
    case ResonanceContext::Kind::Generic:
      break;
    case ResonanceContext::Kind::Symmetric:
      if (near(L, a * context.R0, kResonanceTol)) {
        return {false, NonresonanceCondition::A, "L = aR"};
      }
      if (out.ok) out.which = NonresonanceCondition::A;
      break;
    case ResonanceContext::Kind::Asymmetric:
      if (near(L, a * context.R0, kResonanceTol)) return {false, NonresonanceCondition::B, "L = aR0"};
      if (near(L, a * context.R1, kResonanceTol)) return {false, NonresonanceCondition::B, "L = aR1"};
      if (out.ok) out.which = NonresonanceCondition::B;
      break;
  }
  return out;
}

std::array<cplx, 4> cubic_c_coefficients(const double (&a)[4][4], const double (&b)[4][4], cplx lambda) {
  const cplx i(0.0, 1.0);
  const cplx pre = std::conj(lambda) / 8.0;
  const double a30 = a[3][0], a21 = a[2][1], a12 = a[1][2], a03 = a[0][3];
  const double b30 = b[3][0], b21 = b[2][1], b12 = b[1][2], b03 = b[0][3];
  const cplx c30 = pre * (a30 + i * b30 - i * a21 + b21 - a12 - i * b12 + i * a03 - b03);
  const cplx c21 = pre * (3 * a30 + 3.0 * i * b30 - i * a21 + b21 + a12 + i * b12 - 3.0 * i * a03 + 3 * b03);
  const cplx c12 = pre * (3 * a30 + 3.0 * i * b30 + i * a21 - b21 + a12 + i * b12 + 3.0 * i * a03 - 3 * b03);
  const cplx c03 = pre * (a30 + i * b30 + i * a21 - b21 - a12 - i * b12 - i * a03 + b03);
  return {c30, c21, c12, c03};
}

TwistResult twist_from_jet(const MapJet& jet, const TwistOptions& options) {
  if (jet.degree() < 3) fail(ErrorCode::InvalidArgument, "twist needs a jet of degree >= 3");
  const Mat2 M = jet.linear();
  const StabilityClass cls = classify(M);
  if (cls.kind != LinearClass::Elliptic) {
    fail(ErrorCode::NotElliptic, std::string("linear part is ") + std::string(to_string(cls.kind)));
  }
  if (options.require_nonresonant) {
    const auto nr = check_nonresonance(M);
    if (!nr.ok) fail(ErrorCode::ResonantOrbit, nr.detail);
  }
  if (M.m12 * M.m21 >= 0.0) fail(ErrorCode::ScaleDegenerate, "m12 * m21 >= 0");

  // M = B R B^-1 with B = [[p, 0], [q, 1/p]].
  const double c = 0.5 * M.trace();
  const double sn = (M.m12 > 0 ? -1.0 : 1.0) * std::sqrt(1.0 - c * c);
  const double p = std::sqrt(-M.m12 / sn);
  const double q = (M.m11 - M.m22) / (2.0 * p * sn);
  Mat2 C{p, 0.0, q, 1.0 / p};
  double orientation = 1.0;
  if (options.chart == ChartVariant::Mirror) {
    C = C * Mat2{1.0, 0.0, 0.0, -1.0};
    orientation = -1.0;
  } else if (options.chart == ChartVariant::Swapped) {
    C = C * Mat2{0.0, 1.0, -1.0, 0.0};
  }
  const double dC = C.det();
  const Mat2 Ci{C.m22 / dC, -C.m12 / dC, -C.m21 / dC, C.m11 / dC};

  const int d = jet.degree();
  const Jet2 x = Jet2::s_variable(d), y = Jet2::u_variable(d);
  const Jet2 ds = C.m11 * x + C.m12 * y;
  const Jet2 du = C.m21 * x + C.m22 * y;
  const Jet2 S = compose(jet.s1.without_constant(), ds, du);
  const Jet2 U = compose(jet.u1.without_constant(), ds, du);
  const Jet2 X = Ci.m11 * S + Ci.m12 * U;
  const Jet2 Y = Ci.m21 * S + Ci.m22 * U;

  const double rc = X(1, 0), rs = Y(1, 0);
  if (std::abs(X(0, 1) + rs) > 1e-8 || std::abs(Y(0, 1) - rc) > 1e-8) {
    fail(ErrorCode::ScaleDegenerate, "chart does not reduce the linear part to a rotation");
  }

  TwistResult out;
  out.eta = p;
  out.q = q;
  out.lambda = {rc, rs};
  out.theta = std::atan2(rs, rc);
  for (int j = 0; j <= 3; ++j) {
    out.a[j][3 - j] = X(j, 3 - j);
    out.b[j][3 - j] = Y(j, 3 - j);
  }
  const auto cs = cubic_c_coefficients(out.a, out.b, out.lambda);
  out.c30 = cs[0];
  out.c21 = cs[1];
  out.c12 = cs[2];
  out.c03 = cs[3];
  out.tau1 = orientation * out.c21.imag();
  out.residual_re_c21 = std::abs(out.c21.real());
  out.residual_c12 = std::abs(out.c12 + 3.0 * std::conj(out.c30));
  return out;
}

double twist_symmetric_closed(double a, double L, double R, double Rpp) {
  const double den = 8 * a * a * R * (L - 2 * a * R);
  if (near(L, 2 * a * R, 1e-12)) fail(ErrorCode::ResonantOrParabolic, "L = 2aR");
  if (near(L, a * R, 1e-12)) fail(ErrorCode::ResonantOrParabolic, "L = aR");
  const double num = a * a * L * R * Rpp + (4 - 3 * a) * a * L + 2 * (2 * a - 9) * a * R + 12 * R;
  return num / den;
}

double twist_symmetric_closed_ab(double a, double b, double L, double R, double Rpp) {
  const double s = a + b;
  if (near(s * L, 2 * a * R, 1e-12)) fail(ErrorCode::ResonantOrParabolic, "(a+b)L = 2aR");
  const double num = a * (a + 4 * b) * L - 2 * (a * a - 3 * a * b - 6 * b * b) * R + a * a * s * s * L * R * Rpp;
  return num / (8 * a * a * R * (s * L - 2 * a * R));
}

double twist_lemon_closed(double a, double L) {
  if (near(L, 2 * a, 1e-12) || near(L, a, 1e-12)) fail(ErrorCode::ResonantOrParabolic, "L in {a, 2a}");
  return (a * a * (3 * L - 4) + a * (18 - 4 * L) - 12) / (8 * a * a * (2 * a - L));
}

double twist_ellipse_closed(double a, double delta) {
  const double d2 = delta * delta;
  if (near(d2, a, 1e-12) || near(2 * d2, a, 1e-12)) fail(ErrorCode::ResonantOrParabolic, "delta in {sqrt(a), sqrt(a/2)}");
  return delta * (-6 + a * (9 + a - 4 * d2)) / (8 * a * a * (a - d2));
}

AsymmetricClosed twist_asymmetric_closed(double a, double L, double R0, double R1, double R0pp, double R1pp) {
  const double g0 = L - a * R0, g1 = L - a * R1, g2 = L - a * (R0 + R1);
  const double scale = std::max({1.0, L, a * R0, a * R1});
  if (std::abs(g0) <= 1e-12 * scale || std::abs(g1) <= 1e-12 * scale || std::abs(g2) <= 1e-12 * scale) {
    fail(ErrorCode::ResonantOrParabolic, "L in {aR0, aR1, a(R0+R1)}");
  }
  const double a2 = a * a;
  const double first = 2 * a * R0 * R0 *
                       (-L * R1 * (a2 * L * R1pp + 4 * a2 - 18 * a + 12) + a * (2 * a2 - 9 * a + 6) * R1 * R1 +
                        a * (3 * a - 4) * L * L);
  const double Delta =
      first + first +
      R0 * (L * L * R1 * (a2 * L * R0pp + a2 * L * R1pp + 8 * a2 - 36 * a + 24) -
            2 * a * L * R1 * R1 * (a2 * L * R0pp + 4 * a2 - 18 * a + 12) +
            a2 * R1 * R1 * R1 * (a2 * L * R0pp + 2 * a2 - 9 * a + 6) + a * (4 - 3 * a) * L * L * L) +
      a2 * R0 * R0 * R0 * (R1 * (a2 * L * R1pp + 2 * a2 - 9 * a + 6) + a * (4 - 3 * a) * L) -
      a * (3 * a - 4) * L * R1 * g1 * g1;
  return {Delta / (8 * a * R0 * R1 * g0 * g1 * g2), true};
}

double twist_asymmetric_euclidean(double L, double R0, double R1, double R0pp, double R1pp) {
  const double e = 1e-12 * std::max({1.0, L, R0, R1});
  if (std::abs(R0 - L) <= e || std::abs(R1 - L) <= e || std::abs(R0 + R1 - L) <= e) {
    fail(ErrorCode::ResonantOrParabolic, "L in {R0, R1, R0+R1}");
  }
  return ((R0 + R1) / (R0 * R1) -
          L / (R0 + R1 - L) * ((R1 - L) / (R0 - L) * R0pp + (R0 - L) / (R1 - L) * R1pp)) /
         8.0;
}

StabilityReport report(const Billiard& billiard) {
  StabilityReport r;
  r.table_kind = billiard.table().kind;
  const auto* mixed = dynamic_cast<const MixedNorm*>(&billiard.norm());
  if (mixed) {
    r.a = mixed->a();
    r.b = mixed->b();
    r.k = mixed->k();
  }
  const bool family = mixed && mixed->k() == 2 && std::abs(r.a + r.b - 1.0) <= 1e-12;
  r.vertex = vertex_data(billiard);
  const VertexData& v = r.vertex;
  r.symmetric = near(v.R0, v.R1, 1e-12) && std::abs(v.R0pp - v.R1pp) <= 1e-10 * std::max(1.0, std::abs(v.R0pp));
  r.steps = r.symmetric ? 1 : 2;

  const MapJet jet = r.symmetric ? map_jet(billiard) : two_step_jet(billiard);
  r.cls = classify(jet.linear());

  if (r.cls.kind != LinearClass::Elliptic) {
    r.verdict = r.cls.kind == LinearClass::Hyperbolic ? MoserVerdict::NoHyperbolic : MoserVerdict::NoParabolic;
    return r;
  }

  ResonanceContext ctx;
  if (family) {
    ctx = r.symmetric ? ResonanceContext::symmetric(r.a, v.L, v.R0)
                      : ResonanceContext::asymmetric(r.a, v.L, v.R0, v.R1);
  }
  r.nonresonance = check_nonresonance(jet.linear(), ctx);

  try {
    r.twist = twist_from_jet(jet, {ChartVariant::Standard, false});
  } catch (const Error& e) {
    r.twist_error = e.what();
  }

  if (family) {
    try {
      if (r.symmetric) {
        r.tau1_closed = twist_symmetric_closed(r.a, v.L, v.R0, v.R0pp);
      } else {
        r.tau1_closed_asymmetric = twist_asymmetric_closed(r.a, v.L, v.R0, v.R1, v.R0pp, v.R1pp).value;
        if (r.a == 1.0) r.tau1_euclidean = twist_asymmetric_euclidean(v.L, v.R0, v.R1, v.R0pp, v.R1pp);
      }
    } catch (const Error&) {
      // resonant or parabolic: no closed value
    }
  }

  if (!r.nonresonance->ok) {
    r.verdict = MoserVerdict::UnknownResonant;
  } else if (!r.twist || std::abs(r.twist->tau1) <= kZeroTwistTolerance) {
    r.verdict = MoserVerdict::UnknownZeroTwist;
  } else {
    r.verdict = MoserVerdict::Yes;
  }
  return r;
}

std::vector<std::pair<std::string, std::string>> to_key_values(const StabilityReport& r) {
  std::vector<std::pair<std::string, std::string>> kv;
  auto put = [&](std::string k, std::string v) { kv.emplace_back(std::move(k), std::move(v)); };
  auto opt = [&](std::string k, const std::optional<double>& v) { put(std::move(k), v ? fmt(*v) : "none"); };
  put("table", r.table_kind);
  put("norm_a", fmt(r.a));
  put("norm_b", fmt(r.b));
  put("norm_k", std::to_string(r.k));
  put("L", fmt(r.vertex.L));
  put("R0", fmt(r.vertex.R0));
  put("R0pp", fmt(r.vertex.R0pp));
  put("R1", fmt(r.vertex.R1));
  put("R1pp", fmt(r.vertex.R1pp));
  put("symmetric", r.symmetric ? "true" : "false");
  put("map_steps", std::to_string(r.steps));
  put("class", std::string(to_string(r.cls.kind)));
  put("trace", fmt(r.cls.trace));
  put("lambda_re", fmt(r.cls.lambda.real()));
  put("lambda_im", fmt(r.cls.lambda.imag()));
  if (r.nonresonance) {
    put("nonresonant", r.nonresonance->ok ? "true" : "false");
    put("nonresonance_condition", std::string(to_string(r.nonresonance->which)));
    put("nonresonance_detail", r.nonresonance->detail.empty() ? "none" : r.nonresonance->detail);
  } else {
    put("nonresonant", "n/a");
    put("nonresonance_condition", "none");
    put("nonresonance_detail", "none");
  }
  opt("tau1_numeric", r.tau1_numeric());
  if (r.twist) {
    put("theta", fmt(r.twist->theta));
    put("eta", fmt(r.twist->eta));
    put("residual_re_c21", fmt(r.twist->residual_re_c21));
    put("residual_c12", fmt(r.twist->residual_c12));
  }
  opt("tau1_closed", r.tau1_closed);
  if (!r.symmetric) {
    opt("tau1_closed_asymmetric", r.tau1_closed_asymmetric);
    put("tau1_closed_asymmetric_flag", "typo-suspected");
    opt("tau1_closed_euclidean", r.tau1_euclidean);
  }
  if (!r.twist_error.empty()) put("twist_error", r.twist_error);
  put("moser_stable", std::string(to_string(r.verdict)));
  return kv;
}

std::string serialize(const StabilityReport& r) {
  std::ostringstream os;
  for (const auto& [k, v] : to_key_values(r)) os << k << '=' << v << '\n';
  return os.str();
}

}  // namespace mbill
