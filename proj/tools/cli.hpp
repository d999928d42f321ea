#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "semsyn/explore.hpp"
#include "semsyn/guide.hpp"

namespace semsyn::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kUnsupported = 2, kResource = 3 };

/// Runs one command line (args[0] is the first subcommand name, not the
/// program name). Verdicts and reports go to `out`, diagnostics to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// One line of an instance file: {"name", "formula", "ins", "outs", ...}.
struct Instance {
  std::string name;
  std::string formula;
  std::vector<std::string> ins, outs;
  std::size_t automatonStates = 0;
  bool large = false;
};

std::vector<Instance> read_instances(std::istream& in);
void write_instance(std::ostream& out, const Instance& inst);

/// baseline, reverse, random or model:<path>.
std::unique_ptr<Heuristic> make_heuristic(const std::string& spec, std::uint64_t seed);

struct RunReport {
  std::string instance;
  std::string heuristic;
  std::uint64_t seed = 0;
  RunStats stats;
  double timeMs = 0.0;
};

/// Geometric mean of reference/candidate time over instances both solved
/// where the slower of the two took at least `cutoffMs`; `count` receives the
/// number of such instances. Times are floored at 0.01 ms.
double geomean_ratio(const std::vector<RunReport>& reference, const std::vector<RunReport>& candidate,
                     double cutoffMs, std::size_t* count = nullptr);

}  // namespace semsyn::cli
