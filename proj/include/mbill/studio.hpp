#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mbill/dynamics.hpp"
#include "mbill/geometry.hpp"
#include "mbill/normalform.hpp"

namespace mbill::studio {

enum class Command { Orbit, Portrait, Twist, StabilityMap, Verify };

std::optional<Command> parse_command(const std::string& name);

struct NormConfig {
  double a = 1.0;
  double b = 0.0;
  int k = 2;
};

struct TableConfig {
  std::string kind;  // lemon | ellipse | circle | polynomial
  double L = 1.0;
  double r0 = 1.0, r1 = 1.0;
  double delta = 0.5;
  double radius = 1.0;
  std::vector<double> alpha, beta;
  double epsilon = 0.0;
};

/// Orbit start: a boundary point with a Euclidean direction angle, or (piece, s, u).
struct OrbitStart {
  bool from_point = false;
  Vec2 point;
  double angle = 0.0;
  PhasePointSU su;
};

struct OrbitRun {
  int n = 100;
  OrbitStart start;
};

struct PortraitRun {
  int ns = 40;
  int nu = 40;
  int n = 500;
  double margin = 0.02;  // fraction of the admissible u interval left out at each end
  bool jitter = false;   // seeded offsets inside each grid cell
};

struct Axis {
  double min = 0.0;
  double max = 1.0;
  int steps = 2;
  double at(int i) const noexcept { return steps == 1 ? min : min + (max - min) * i / (steps - 1); }
};

/// (a, L) for lemons, (a, delta) for ellipses.
struct GridSpec {
  std::string family;
  Axis a;
  Axis x;
};

struct RunConfig {
  NormConfig norm;
  TableConfig table;
  OrbitRun orbit;
  PortraitRun portrait;
  GridSpec grid;
  std::uint64_t seed = 0;
};

/// Parses and validates the fields the command needs.  Throws Error(ConfigError)
/// with the offending field in the message.
RunConfig parse_config(const std::string& json_text, Command command);
RunConfig load_config(const std::filesystem::path& path, Command command);

Table make_table(const TableConfig& t);
Billiard make_billiard(const RunConfig& c);

struct Options {
  std::filesystem::path out_dir = ".";
  int jobs = 1;
  std::optional<std::uint64_t> seed;  // overrides the config seed
  bool verbose = false;
};

// Pure cores.

StatePoint orbit_start_state(const Billiard& billiard, const OrbitStart& start);

struct PortraitSample {
  int orbit = 0;
  int bounce = 0;
  int piece = 0;
  double s = 0.0;
  double S = 0.0;  // boundary length coordinate over all pieces
  double u = 0.0;
};

struct Portrait {
  std::vector<PortraitSample> samples;
  double total_length = 0.0;
  int orbits = 0;
  int terminated = 0;
};

Portrait compute_portrait(const Billiard& billiard, const PortraitRun& run, int jobs, std::uint64_t seed);

struct MapCell {
  double a = 0.0;
  double x = 0.0;
  std::string cls;
  double trace = 0.0;
  std::string nonresonant;  // true | false | n/a
  std::optional<double> tau1_numeric;
  std::optional<double> tau1_closed;
  int tau1_sign = 0;
  std::string verdict;
  std::string error;
};

std::vector<MapCell> compute_stability_map(const GridSpec& grid, int jobs);

// Emitters.

std::string format_double(double x);
std::string orbit_csv(const Billiard& billiard, const Orbit& orbit);
std::string orbit_svg(const Billiard& billiard, const Orbit& orbit);
std::string portrait_csv(const Portrait& p);
std::string portrait_svg(const Portrait& p);
std::string stability_map_csv(const GridSpec& grid, const std::vector<MapCell>& cells);
std::string stability_map_svg(const GridSpec& grid, const std::vector<MapCell>& cells);

// Commands; the return value is the process exit code.

int cmd_orbit(const RunConfig& config, const Options& options, std::ostream& log);
int cmd_portrait(const RunConfig& config, const Options& options, std::ostream& log);
int cmd_twist(const RunConfig& config, const Options& options, std::ostream& log);
int cmd_stability_map(const RunConfig& config, const Options& options, std::ostream& log);

}  // namespace mbill::studio
