#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "boxlb/construct.hpp"
#include "boxlb/records.hpp"
#include "boxlb/trials.hpp"

namespace boxlb::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kBudget = 2, kVerification = 3 };

struct RunConfig {
  std::string command;
  int d = 2;
  int r = 1;
  int s = 2;
  std::uint32_t p = 3;
  std::uint32_t k = 1;
  std::uint64_t trials = 100;
  std::uint64_t seed = 0;
  Mode mode = Mode::sampled;
  Format format = Format::text;
  std::string out_path;
  std::string in_path;
  Budget budget;
  double delta = 0.5;
  unsigned workers = 0;
  bool emit_edges = false;
  int d_min = 2;
  int d_max = 22;
  std::uint64_t r_max = 1;
};

// Each command writes data records to `out` and a human-readable summary to
// `err`, and returns an ExitCode.
int cmd_table(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_construct(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_trials(const RunConfig& config, std::ostream& out, std::ostream& err);
/// Re-checks a text dump written by `construct`.
int cmd_verify(const RunConfig& config, std::istream& dump, std::ostream& out, std::ostream& err);

/// Parses argv (without the program name) and dispatches.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace boxlb::cli
