#include "mbill/studio.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace mbill::studio {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
  fail(ErrorCode::ConfigError, field + ": " + what);
}

const json& member(const json& obj, const std::string& key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) config_error(path + "." + key, "missing");
  return *it;
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& path) {
  if (!obj.is_object()) config_error(path, "must be an object");
  for (const auto& [k, v] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; })) {
      config_error(path + "." + k, "unknown field");
    }
  }
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) config_error(path, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) config_error(path, "must be finite");
  return x;
}

double number_or(const json& obj, const char* key, double fallback, const std::string& path) {
  const auto it = obj.find(key);
  return it == obj.end() ? fallback : number(*it, path + "." + key);
}

double positive(const json& v, const std::string& path) {
  const double x = number(v, path);
  if (!(x > 0.0)) config_error(path, "must be positive");
  return x;
}

long long integer(const json& v, const std::string& path, long long lo) {
  if (!v.is_number_integer()) config_error(path, "must be an integer");
  const long long x = v.get<long long>();
  if (x < lo) config_error(path, "must be at least " + std::to_string(lo));
  return x;
}

int int_or(const json& obj, const char* key, int fallback, const std::string& path, int lo) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  const long long x = integer(*it, path + "." + key, lo);
  if (x > 100000000) config_error(path + "." + key, "too large");
  return static_cast<int>(x);
}

std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) config_error(path, "must be a nonempty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

NormConfig parse_norm(const json& j) {
  check_keys(j, {"a", "b", "k"}, "norm");
  NormConfig n;
  n.a = number(member(j, "a", "norm"), "norm.a");
  if (!(n.a >= 0.0)) config_error("norm.a", "must be nonnegative");
  n.b = number_or(j, "b", 1.0 - n.a, "norm");
  if (!(n.b >= 0.0)) config_error("norm.b", "must be nonnegative");
  if (!(n.a + n.b > 0.0)) config_error("norm.a", "a and b cannot both vanish");
  n.k = int_or(j, "k", 2, "norm", 1);
  return n;
}

TableConfig parse_table(const json& j) {
  check_keys(j, {"kind", "params"}, "table");
  const json& kind = member(j, "kind", "table");
  if (!kind.is_string()) config_error("table.kind", "must be a string");
  TableConfig t;
  t.kind = kind.get<std::string>();
  const json empty = json::object();
  const auto pit = j.find("params");
  const json& p = pit == j.end() ? empty : *pit;
  const std::string path = "table.params";
  if (t.kind == "lemon") {
    check_keys(p, {"L", "r0", "r1"}, path);
    t.L = positive(member(p, "L", path), path + ".L");
    t.r0 = p.contains("r0") ? positive(p["r0"], path + ".r0") : 1.0;
    t.r1 = p.contains("r1") ? positive(p["r1"], path + ".r1") : 1.0;
  } else if (t.kind == "ellipse") {
    check_keys(p, {"delta"}, path);
    t.delta = positive(member(p, "delta", path), path + ".delta");
  } else if (t.kind == "circle") {
    check_keys(p, {"radius"}, path);
    t.radius = p.contains("radius") ? positive(p["radius"], path + ".radius") : 1.0;
  } else if (t.kind == "polynomial") {
    check_keys(p, {"alpha", "beta", "L", "epsilon"}, path);
    t.alpha = number_list(member(p, "alpha", path), path + ".alpha");
    t.beta = number_list(member(p, "beta", path), path + ".beta");
    t.L = positive(member(p, "L", path), path + ".L");
    t.epsilon = number_or(p, "epsilon", 0.0, path);
    if (t.epsilon < 0.0) config_error(path + ".epsilon", "must be nonnegative");
  } else {
    config_error("table.kind", "unknown kind '" + t.kind + "' (lemon, ellipse, circle, polynomial)");
  }
  try {
    (void)make_table(t);
  } catch (const Error& e) {
    config_error(path, e.what());
  }
  return t;
}

Axis parse_axis(const json& j, const std::string& path) {
  check_keys(j, {"min", "max", "steps"}, path);
  Axis ax;
  ax.min = number(member(j, "min", path), path + ".min");
  ax.max = number(member(j, "max", path), path + ".max");
  ax.steps = static_cast<int>(integer(member(j, "steps", path), path + ".steps", 2));
  if (!(ax.max > ax.min)) config_error(path, "max must exceed min");
  return ax;
}

template <class F>
void parallel_for(int n, int jobs, F&& body) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex m;
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(m);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) config_error("--out", "cannot write " + path.string());
  f << text;
  if (!f) config_error("--out", "cannot write " + path.string());
}

std::filesystem::path prepare_out(const Options& o) {
  std::error_code ec;
  std::filesystem::create_directories(o.out_dir, ec);
  if (ec) config_error("--out", "cannot create " + o.out_dir.string() + ": " + ec.message());
  return o.out_dir;
}

std::string hue_color(double h) {
  // HSV with s = 0.75, v = 0.85.
  h -= std::floor(h);
  const double s = 0.75, v = 0.85;
  const double c = v * s, hp = h * 6.0, x = c * (1 - std::abs(std::fmod(hp, 2.0) - 1));
  double r = 0, g = 0, b = 0;
  if (hp < 1) r = c, g = x;
  else if (hp < 2) r = x, g = c;
  else if (hp < 3) g = c, b = x;
  else if (hp < 4) g = x, b = c;
  else if (hp < 5) r = x, b = c;
  else r = c, b = x;
  const double m = v - c;
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround((r + m) * 255)),
                static_cast<int>(std::lround((g + m) * 255)), static_cast<int>(std::lround((b + m) * 255)));
  return buf;
}

std::string fmt_px(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::vector<double> piece_offsets(const Billiard& b) {
  std::vector<double> off{0.0};
  for (int i = 0; i < static_cast<int>(b.table().size()); ++i) {
    off.push_back(off.back() + b.chart(i).s_hi() - b.chart(i).s_lo());
  }
  return off;
}

}  // namespace

std::optional<Command> parse_command(const std::string& name) {
  if (name == "orbit") return Command::Orbit;
  if (name == "portrait") return Command::Portrait;
  if (name == "twist") return Command::Twist;
  if (name == "stability-map") return Command::StabilityMap;
  if (name == "verify") return Command::Verify;
  return std::nullopt;
}

Table make_table(const TableConfig& t) {
  if (t.kind == "lemon") return make_lemon(t.L, t.r0, t.r1);
  if (t.kind == "ellipse") return make_ellipse(t.delta);
  if (t.kind == "circle") return make_circle(t.radius);
  if (t.kind == "polynomial") return make_polynomial_table(t.alpha, t.beta, t.L, t.epsilon);
  fail(ErrorCode::ConfigError, "table.kind: unknown kind '" + t.kind + "'");
}

Billiard make_billiard(const RunConfig& c) {
  return Billiard(make_table(c.table), std::make_shared<MixedNorm>(c.norm.a, c.norm.b, c.norm.k));
}

RunConfig parse_config(const std::string& json_text, Command command) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    config_error("config", std::string("invalid JSON: ") + e.what());
  }
  check_keys(j, {"norm", "table", "run"}, "config");
  RunConfig c;
  const bool grid = command == Command::StabilityMap;
  if (!grid) {
    c.norm = parse_norm(member(j, "norm", "config"));
    c.table = parse_table(member(j, "table", "config"));
    try {
      (void)MixedNorm(c.norm.a, c.norm.b, c.norm.k);
    } catch (const Error& e) {
      config_error("norm", e.what());
    }
  }
  if (command == Command::Twist) {
    if (std::abs(c.norm.a + c.norm.b - 1.0) > 1e-12) config_error("norm.b", "twist needs a + b = 1");
    if (c.norm.k != 2) config_error("norm.k", "twist needs k = 2");
    if (!(c.norm.a > 0.0)) config_error("norm.a", "twist needs a > 0");
  }

  const json empty = json::object();
  const auto rit = j.find("run");
  const json& run = rit == j.end() ? empty : *rit;
  switch (command) {
    case Command::Orbit: {
      check_keys(run, {"n", "start", "seed"}, "run");
      c.orbit.n = int_or(run, "n", 100, "run", 1);
      const json& st = member(run, "start", "run");
      if (!st.is_object()) config_error("run.start", "must be an object");
      if (st.contains("point")) {
        check_keys(st, {"point", "angle"}, "run.start");
        const auto p = number_list(st["point"], "run.start.point");
        if (p.size() != 2) config_error("run.start.point", "must have two entries");
        c.orbit.start.from_point = true;
        c.orbit.start.point = {p[0], p[1]};
        c.orbit.start.angle = number(member(st, "angle", "run.start"), "run.start.angle");
      } else {
        check_keys(st, {"piece", "s", "u"}, "run.start");
        c.orbit.start.su.piece = static_cast<int>(integer(member(st, "piece", "run.start"), "run.start.piece", 0));
        c.orbit.start.su.s = number(member(st, "s", "run.start"), "run.start.s");
        c.orbit.start.su.u = number(member(st, "u", "run.start"), "run.start.u");
        if (c.orbit.start.su.piece >= static_cast<int>(make_table(c.table).size())) {
          config_error("run.start.piece", "no such piece");
        }
      }
      break;
    }
    case Command::Portrait: {
      check_keys(run, {"ns", "nu", "n", "margin", "jitter", "seed"}, "run");
      c.portrait.ns = int_or(run, "ns", 40, "run", 1);
      c.portrait.nu = int_or(run, "nu", 40, "run", 1);
      c.portrait.n = int_or(run, "n", 500, "run", 1);
      c.portrait.margin = number_or(run, "margin", 0.02, "run");
      if (!(c.portrait.margin >= 0.0 && c.portrait.margin < 0.5)) config_error("run.margin", "must lie in [0, 0.5)");
      if (run.contains("jitter")) {
        if (!run["jitter"].is_boolean()) config_error("run.jitter", "must be true or false");
        c.portrait.jitter = run["jitter"].get<bool>();
      }
      break;
    }
    case Command::StabilityMap: {
      check_keys(run, {"family", "a", "L", "delta", "seed"}, "run");
      const json& fam = member(run, "family", "run");
      if (!fam.is_string()) config_error("run.family", "must be a string");
      c.grid.family = fam.get<std::string>();
      c.grid.a = parse_axis(member(run, "a", "run"), "run.a");
      if (!(c.grid.a.min > 0.0 && c.grid.a.max <= 1.0)) config_error("run.a", "must lie in (0, 1]");
      if (c.grid.family == "lemon") {
        if (run.contains("delta")) config_error("run.delta", "lemon grids use run.L");
        c.grid.x = parse_axis(member(run, "L", "run"), "run.L");
        if (!(c.grid.x.min > 0.0 && c.grid.x.max < 2.0)) config_error("run.L", "must lie in (0, 2)");
      } else if (c.grid.family == "ellipse") {
        if (run.contains("L")) config_error("run.L", "ellipse grids use run.delta");
        c.grid.x = parse_axis(member(run, "delta", "run"), "run.delta");
        if (!(c.grid.x.min > 0.0)) config_error("run.delta", "must be positive");
      } else {
        config_error("run.family", "must be lemon or ellipse");
      }
      break;
    }
    case Command::Twist:
      check_keys(run, {"seed"}, "run");
      break;
    case Command::Verify:
      break;
  }
  if (run.contains("seed")) c.seed = static_cast<std::uint64_t>(integer(run["seed"], "run.seed", 0));
  return c;
}

RunConfig load_config(const std::filesystem::path& path, Command command) {
  std::ifstream f(path, std::ios::binary);
  if (!f) config_error("--config", "cannot read " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), command);
}

StatePoint orbit_start_state(const Billiard& billiard, const OrbitStart& start) {
  if (!start.from_point) {
    if (start.su.piece < 0 || start.su.piece >= static_cast<int>(billiard.table().size())) {
      fail(ErrorCode::ConfigError, "run.start.piece: no such piece");
    }
    const auto [lo, hi] = admissible_u(billiard, start.su.piece, start.su.s);
    if (!(start.su.u > lo && start.su.u < hi)) {
      fail(ErrorCode::ConfigError, "run.start.u: outside the admissible interval (" + format_double(lo) + ", " +
                                       format_double(hi) + ")");
    }
    return state_from_su(billiard, start.su);
  }
  const BoundaryLocation loc = locate(billiard, start.point);
  const BoundaryPoint bp = boundary_point(billiard, loc.piece, loc.s);
  const double scale = std::max(1.0, euclid_norm(start.point));
  if (euclid_norm(bp.position - start.point) > 1e-6 * scale) {
    fail(ErrorCode::ConfigError, "run.start.point: not on the boundary (distance " +
                                     format_double(euclid_norm(bp.position - start.point)) + ")");
  }
  const Vec2 d = unit_vector(start.angle);
  if (!(cross(bp.tangent, d) > 0.0)) {
    fail(ErrorCode::ConfigError, "run.start.angle: direction does not point into the table");
  }
  StatePoint st;
  st.position = bp.position;
  st.direction = d / billiard.norm().value(d);
  st.piece = loc.piece;
  st.s = loc.s;
  st.tau = billiard.chart(loc.piece).tau_of_s(loc.s);
  return st;
}

Portrait compute_portrait(const Billiard& billiard, const PortraitRun& run, int jobs, std::uint64_t seed) {
  const std::vector<double> off = piece_offsets(billiard);
  Portrait out;
  out.total_length = off.back();
  out.orbits = run.ns * run.nu;

  struct Start {
    PhasePointSU p;
    bool ok = true;
  };
  std::vector<Start> starts(static_cast<std::size_t>(out.orbits));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jit(-0.5, 0.5);
  for (int i = 0; i < run.ns; ++i) {
    for (int j = 0; j < run.nu; ++j) {
      const double ji = run.jitter ? jit(rng) : 0.0;
      const double jj = run.jitter ? jit(rng) : 0.0;
      const double S = (i + 0.5 + ji) / run.ns * out.total_length;
      int piece = static_cast<int>(std::upper_bound(off.begin(), off.end(), S) - off.begin()) - 1;
      piece = std::clamp(piece, 0, static_cast<int>(billiard.table().size()) - 1);
      const double s = billiard.chart(piece).s_lo() + (S - off[static_cast<std::size_t>(piece)]);
      Start& st = starts[static_cast<std::size_t>(i * run.nu + j)];
      try {
        const auto [lo, hi] = admissible_u(billiard, piece, s);
        const double t = run.margin + (1.0 - 2.0 * run.margin) * (j + 0.5 + jj) / run.nu;
        st.p = {piece, s, lo + t * (hi - lo)};
      } catch (const Error&) {
        st.ok = false;
        st.p = {piece, s, 0.0};
      }
    }
  }

  std::vector<std::vector<PortraitSample>> per(starts.size());
  std::vector<char> cut(starts.size(), 0);
  parallel_for(static_cast<int>(starts.size()), jobs, [&](int idx) {
    const Start& st = starts[static_cast<std::size_t>(idx)];
    auto& rows = per[static_cast<std::size_t>(idx)];
    if (!st.ok) {
      cut[static_cast<std::size_t>(idx)] = 1;
      return;
    }
    Orbit o;
    try {
      o = iterate(billiard, st.p, run.n);
    } catch (const Error&) {
      o.points = {st.p};
      o.terminal = ErrorCode::NoRoot;
    }
    if (o.terminal) cut[static_cast<std::size_t>(idx)] = 1;
    rows.reserve(o.points.size());
    for (std::size_t k = 0; k < o.points.size(); ++k) {
      const PhasePointSU& p = o.points[k];
      const double S = off[static_cast<std::size_t>(p.piece)] + p.s - billiard.chart(p.piece).s_lo();
      rows.push_back({idx, static_cast<int>(k), p.piece, p.s, S, p.u});
    }
  });
  std::size_t total = 0;
  for (const auto& r : per) total += r.size();
  out.samples.reserve(total);
  for (std::size_t i = 0; i < per.size(); ++i) {
    out.samples.insert(out.samples.end(), per[i].begin(), per[i].end());
    out.terminated += cut[i];
  }
  return out;
}

std::vector<MapCell> compute_stability_map(const GridSpec& grid, int jobs) {
  const int na = grid.a.steps, nx = grid.x.steps;
  std::vector<MapCell> cells(static_cast<std::size_t>(na * nx));
  parallel_for(na * nx, jobs, [&](int idx) {
    MapCell& c = cells[static_cast<std::size_t>(idx)];
    c.a = grid.a.at(idx / nx);
    c.x = grid.x.at(idx % nx);
    try {
      Table t = grid.family == "lemon" ? make_lemon(c.x) : make_ellipse(c.x);
      const Billiard b(std::move(t), std::make_shared<MixedNorm>(MixedNorm::standard(c.a)));
      const StabilityReport r = report(b);
      c.cls = std::string(to_string(r.cls.kind));
      c.trace = r.cls.trace;
      c.nonresonant = r.nonresonance ? (r.nonresonance->ok ? "true" : "false") : "n/a";
      c.tau1_numeric = r.tau1_numeric();
      c.tau1_closed = r.tau1_closed;
      if (c.tau1_numeric) {
        const double t = *c.tau1_numeric;
        c.tau1_sign = std::abs(t) <= kZeroTwistTolerance ? 0 : (t > 0 ? 1 : -1);
      }
      c.verdict = std::string(to_string(r.verdict));
    } catch (const Error& e) {
      c.cls = "error";
      c.nonresonant = "n/a";
      c.verdict = "none";
      c.error = e.what();
    }
  });
  return cells;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string orbit_csv(const Billiard& billiard, const Orbit& orbit) {
  (void)billiard;
  std::string out = "piece_id,s,u,x,y,dir_x,dir_y\n";
  for (std::size_t i = 0; i < orbit.states.size(); ++i) {
    const StatePoint& st = orbit.states[i];
    const PhasePointSU& p = orbit.points[i];
    out += std::to_string(st.piece) + ',' + format_double(st.s) + ',' + format_double(p.u) + ',' +
           format_double(st.position.x) + ',' + format_double(st.position.y) + ',' + format_double(st.direction.x) +
           ',' + format_double(st.direction.y) + '\n';
  }
  return out;
}

std::string orbit_svg(const Billiard& billiard, const Orbit& orbit) {
  std::vector<std::vector<Vec2>> outline;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (int i = 0; i < static_cast<int>(billiard.table().size()); ++i) {
    const Piece& p = billiard.piece(i);
    std::vector<Vec2> pts;
    for (int k = 0; k <= 200; ++k) {
      const Vec2 q = p.point(p.tau_lo + (p.tau_hi - p.tau_lo) * k / 200.0);
      pts.push_back(q);
      xmin = std::min(xmin, q.x), xmax = std::max(xmax, q.x);
      ymin = std::min(ymin, q.y), ymax = std::max(ymax, q.y);
    }
    outline.push_back(std::move(pts));
  }
  const double W = 600.0, pad = 20.0;
  const double scale = (W - 2 * pad) / std::max(xmax - xmin, ymax - ymin);
  const double H = (ymax - ymin) * scale + 2 * pad;
  const double Wd = (xmax - xmin) * scale + 2 * pad;
  auto X = [&](double x) { return fmt_px(pad + (x - xmin) * scale); };
  auto Y = [&](double y) { return fmt_px(pad + (ymax - y) * scale); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt_px(Wd) << "\" height=\"" << fmt_px(H)
     << "\" viewBox=\"0 0 " << fmt_px(Wd) << ' ' << fmt_px(H) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& pts : outline) {
    os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
    for (const Vec2& q : pts) os << X(q.x) << ',' << Y(q.y) << ' ';
    os << "\"/>\n";
  }
  os << "<polyline fill=\"none\" stroke=\"#c8553d\" stroke-width=\"0.6\" points=\"";
  for (const StatePoint& st : orbit.states) os << X(st.position.x) << ',' << Y(st.position.y) << ' ';
  os << "\"/>\n";
  if (!orbit.states.empty()) {
    const Vec2 p0 = orbit.states.front().position;
    os << "<circle cx=\"" << X(p0.x) << "\" cy=\"" << Y(p0.y) << "\" r=\"3\" fill=\"#3b6fb6\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string portrait_csv(const Portrait& p) {
  std::string out = "orbit,bounce,piece_id,s,S,u\n";
  out.reserve(p.samples.size() * 80);
  for (const auto& r : p.samples) {
    out += std::to_string(r.orbit) + ',' + std::to_string(r.bounce) + ',' + std::to_string(r.piece) + ',' +
           format_double(r.s) + ',' + format_double(r.S) + ',' + format_double(r.u) + '\n';
  }
  return out;
}

std::string portrait_svg(const Portrait& p) {
  constexpr int W = 600, H = 300;
  constexpr double pad = 30.0;
  double umin = -1.0, umax = 1.0;
  if (!p.samples.empty()) {
    umin = umax = p.samples.front().u;
    for (const auto& r : p.samples) umin = std::min(umin, r.u), umax = std::max(umax, r.u);
    if (umax - umin < 1e-12) umin -= 0.5, umax += 0.5;
  }
  // One pixel cell per occupied bin, colored by the first orbit to reach it.
  std::vector<int> owner(static_cast<std::size_t>(W * H), -1);
  for (const auto& r : p.samples) {
    const int ix = std::clamp(static_cast<int>(r.S / p.total_length * W), 0, W - 1);
    const int iy = std::clamp(static_cast<int>((umax - r.u) / (umax - umin) * H), 0, H - 1);
    int& o = owner[static_cast<std::size_t>(iy * W + ix)];
    if (o < 0) o = r.orbit;
  }
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W + 2 * pad << "\" height=\"" << H + 2 * pad
     << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<g transform=\"translate(" << pad << ',' << pad << ")\" shape-rendering=\"crispEdges\">\n";
  for (int iy = 0; iy < H; ++iy) {
    for (int ix = 0; ix < W; ++ix) {
      const int o = owner[static_cast<std::size_t>(iy * W + ix)];
      if (o < 0) continue;
      os << "<rect x=\"" << ix << "\" y=\"" << iy << "\" width=\"1\" height=\"1\" fill=\""
         << hue_color(o * 0.6180339887498949) << "\"/>\n";
    }
  }
  os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"none\" stroke=\"black\"/>\n</g>\n";
  os << "<text x=\"" << pad + W / 2.0 << "\" y=\"" << H + 2 * pad - 8
     << "\" font-size=\"12\" text-anchor=\"middle\">S (0 to " << format_double(p.total_length) << ")</text>\n";
  os << "<text x=\"10\" y=\"" << pad + H / 2.0 << "\" font-size=\"12\">u</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string stability_map_csv(const GridSpec& grid, const std::vector<MapCell>& cells) {
  std::string out = std::string("a,") + (grid.family == "lemon" ? "L" : "delta") +
                    ",class,trace,nonresonant,tau1_numeric,tau1_closed,tau1_sign,moser_stable,error\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& c : cells) {
    std::string err = c.error;
    std::replace(err.begin(), err.end(), ',', ';');
    out += format_double(c.a) + ',' + format_double(c.x) + ',' + c.cls + ',' + format_double(c.trace) + ',' +
           c.nonresonant + ',' + opt(c.tau1_numeric) + ',' + opt(c.tau1_closed) + ',' + std::to_string(c.tau1_sign) +
           ',' + c.verdict + ',' + err + '\n';
  }
  return out;
}

std::string stability_map_svg(const GridSpec& grid, const std::vector<MapCell>& cells) {
  const int na = grid.a.steps, nx = grid.x.steps;
  const double cw = std::max(2.0, 600.0 / nx), ch = std::max(2.0, 400.0 / na), pad = 40.0;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt_px(std::max(nx * cw + 2 * pad, 2 * pad + 7 * 86.0)) << "\" height=\""
     << fmt_px(na * ch + 2 * pad + 30) << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<g transform=\"translate(" << pad << ',' << pad << ")\" shape-rendering=\"crispEdges\">\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const MapCell& c = cells[i];
    const int ia = static_cast<int>(i) / nx, ix = static_cast<int>(i) % nx;
    std::string fill = "#ffffff";
    if (c.cls == "Hyperbolic") fill = "#bbbbbb";
    else if (c.cls == "Parabolic") fill = "#000000";
    else if (c.verdict == "Unknown-resonant") fill = "#6a4c93";
    else if (c.verdict == "Unknown-zero-twist") fill = "#f2c14e";
    else if (c.cls == "Elliptic") fill = c.tau1_sign > 0 ? "#3b6fb6" : "#c8553d";
    os << "<rect x=\"" << fmt_px(ix * cw) << "\" y=\"" << fmt_px((na - 1 - ia) * ch) << "\" width=\"" << fmt_px(cw)
       << "\" height=\"" << fmt_px(ch) << "\" fill=\"" << fill << "\"/>\n";
  }
  auto label = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return std::string(buf);
  };
  const double y0 = na * ch + pad;
  os << "</g>\n<text x=\"" << pad << "\" y=\"" << fmt_px(y0 + 20) << "\" font-size=\"12\">"
     << (grid.family == "lemon" ? "L" : "delta") << " from " << label(grid.x.min) << " to " << label(grid.x.max)
     << "; a from " << label(grid.a.min) << " (bottom) to " << label(grid.a.max) << "</text>\n";
  static const std::pair<const char*, const char*> legend[] = {
      {"#3b6fb6", "tau1 &gt; 0"},  {"#c8553d", "tau1 &lt; 0"},     {"#f2c14e", "zero twist"},
      {"#6a4c93", "resonant"}, {"#bbbbbb", "hyperbolic"}, {"#000000", "parabolic"},
      {"#ffffff", "error"}};
  double x = pad;
  for (const auto& [color, text] : legend) {
    os << "<rect x=\"" << fmt_px(x) << "\" y=\"" << fmt_px(y0 + 30) << "\" width=\"10\" height=\"10\" fill=\""
       << color << "\" stroke=\"black\" stroke-width=\"0.5\"/>\n<text x=\"" << fmt_px(x + 14) << "\" y=\""
       << fmt_px(y0 + 39) << "\" font-size=\"11\">" << text << "</text>\n";
    x += 86.0;
  }
  os << "</svg>\n";
  return os.str();
}

int cmd_orbit(const RunConfig& config, const Options& options, std::ostream& log) {
  const Billiard b = make_billiard(config);
  StatePoint start;
  try {
    start = orbit_start_state(b, config.orbit.start);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    config_error("run.start", e.what());
  }
  const Orbit o = iterate_state(b, start, config.orbit.n);
  const auto dir = prepare_out(options);
  write_file(dir / "orbit.csv", orbit_csv(b, o));
  write_file(dir / "orbit.svg", orbit_svg(b, o));
  if (options.verbose) log << "orbit: " << o.states.size() - 1 << " bounces\n";
  if (o.terminal) {
    log << "orbit ended after " << o.states.size() - 1 << " bounces: " << o.message << '\n';
    return 3;
  }
  return 0;
}

int cmd_portrait(const RunConfig& config, const Options& options, std::ostream& log) {
  const Billiard b = make_billiard(config);
  const Portrait p = compute_portrait(b, config.portrait, options.jobs, options.seed.value_or(config.seed));
  const auto dir = prepare_out(options);
  write_file(dir / "portrait.csv", portrait_csv(p));
  write_file(dir / "portrait.svg", portrait_svg(p));
  if (options.verbose) log << "portrait: " << p.orbits << " orbits, " << p.samples.size() << " points\n";
  if (p.terminated > 0) {
    log << "portrait: " << p.terminated << " of " << p.orbits << " orbits ended early\n";
    return 3;
  }
  return 0;
}

int cmd_twist(const RunConfig& config, const Options& options, std::ostream& log) {
  const Billiard b = make_billiard(config);
  const std::string text = serialize(report(b));
  const auto dir = prepare_out(options);
  write_file(dir / "twist.txt", text);
  log << text;
  return 0;
}

int cmd_stability_map(const RunConfig& config, const Options& options, std::ostream& log) {
  const auto cells = compute_stability_map(config.grid, options.jobs);
  const auto dir = prepare_out(options);
  write_file(dir / "stability_map.csv", stability_map_csv(config.grid, cells));
  write_file(dir / "stability_map.svg", stability_map_svg(config.grid, cells));
  if (options.verbose) log << "stability-map: " << cells.size() << " cells\n";
  return 0;
}

}  // namespace mbill::studio
