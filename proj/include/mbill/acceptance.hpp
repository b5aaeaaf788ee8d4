#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace mbill::acceptance {

struct Criterion {
  int id = 0;
  std::string title;
  bool pass = false;
  double seconds = 0.0;
  std::vector<std::string> details;  // residuals and notes, shown in verbose mode
};

struct Options {
  std::uint64_t seed = 0;
  int jobs = 1;
  /// Added to one tangent-map entry while the suite runs; nonzero must make it fail.
  double fault = 0.0;
  /// Scratch directory for the timed portrait run; empty picks a temporary one.
  std::filesystem::path scratch;
};

/// Runs criteria 1 to 12 in order.  Criterion 12 times the others.
std::vector<Criterion> run_all(const Options& options);

/// One line per criterion, then the residual details when verbose.
void print(const std::vector<Criterion>& results, std::ostream& os, bool verbose);

/// 0 when every criterion passes, 1 otherwise.
int verify(const Options& options, std::ostream& os, bool verbose);

}  // namespace mbill::acceptance
