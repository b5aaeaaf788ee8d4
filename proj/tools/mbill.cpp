#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "mbill/acceptance.hpp"
#include "mbill/error.hpp"
#include "mbill/studio.hpp"

namespace {

struct Args {
  std::string config;
  std::string out = ".";
  int jobs = 0;
  std::int64_t seed = -1;
  bool verbose = false;
  double fault = 0.0;
};

void add_common(CLI::App* cmd, Args& a, bool config_required) {
  auto* c = cmd->add_option("--config", a.config, "JSON run configuration");
  if (config_required) c->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", a.out, "output directory (default .)");
  cmd->add_option("--jobs", a.jobs, "worker threads (default: logical cores)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", a.seed, "seed overriding the config value")->check(CLI::NonNegativeNumber);
  cmd->add_flag("--verbose", a.verbose, "extra diagnostics");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace mbill;
  CLI::App app{"Minkowski billiards: orbits, phase portraits, twist coefficients"};
  app.require_subcommand(1);
  Args args;
  auto* orbit = app.add_subcommand("orbit", "trace one orbit; writes orbit.csv and orbit.svg");
  auto* portrait = app.add_subcommand("portrait", "phase portrait; writes portrait.csv and portrait.svg");
  auto* twist = app.add_subcommand("twist", "stability report of the axis 2-orbit; writes twist.txt");
  auto* smap = app.add_subcommand("stability-map", "(a, L) or (a, delta) sweep; writes stability_map.csv/.svg");
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  for (auto* c : {orbit, portrait, twist, smap}) add_common(c, args, true);
  add_common(verify, args, false);
  verify->add_option("--inject-fault", args.fault, "perturb the tangent map by this amount (suite self-check)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  studio::Options opt;
  opt.out_dir = args.out;
  opt.jobs = args.jobs > 0 ? args.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (args.seed >= 0) opt.seed = static_cast<std::uint64_t>(args.seed);
  opt.verbose = args.verbose;

  try {
    if (verify->parsed()) {
      acceptance::Options a;
      a.seed = opt.seed.value_or(0);
      a.jobs = opt.jobs;
      a.fault = args.fault;
      return acceptance::verify(a, std::cout, args.verbose);
    }
    const studio::Command cmd = orbit->parsed()      ? studio::Command::Orbit
                                : portrait->parsed() ? studio::Command::Portrait
                                : twist->parsed()    ? studio::Command::Twist
                                                     : studio::Command::StabilityMap;
    const studio::RunConfig config = studio::load_config(args.config, cmd);
    switch (cmd) {
      case studio::Command::Orbit: return studio::cmd_orbit(config, opt, std::cerr);
      case studio::Command::Portrait: return studio::cmd_portrait(config, opt, std::cerr);
      case studio::Command::Twist: return studio::cmd_twist(config, opt, std::cout);
      default: return studio::cmd_stability_map(config, opt, std::cerr);
    }
  } catch (const Error& e) {
    std::cerr << "mbill: " << e.what() << '\n';
    return e.code() == ErrorCode::ConfigError ? 2 : 4;
  } catch (const std::exception& e) {
    std::cerr << "mbill: " << e.what() << '\n';
    return 4;
  }
}
