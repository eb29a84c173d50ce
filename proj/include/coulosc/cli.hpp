#pragma once

#include "coulosc/core/precision.hpp"
#include "coulosc/core/types.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace coulosc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNotConverged = 3;

enum class Command { Solve, Exact, Bounds, ScanBc, Ordering, Cross, Sweep };
enum class SolverFlag { Aim, Oracle, Both };
enum class OutputFormat { Csv, Json, Text };

/// Everything a command needs, after flags and the optional config file are
/// merged (flags win). Numeric couplings stay decimal strings until the
/// working precision is installed.
struct RunConfig {
  Command command = Command::Solve;
  std::optional<std::string> a, b, radius;
  std::optional<int> l, nodes;
  std::optional<std::string> level;
  PrecisionCtx precision;
  std::optional<std::string> r0;
  int max_iter = 300;
  SolverFlag solver = SolverFlag::Aim;
  std::optional<std::string> output;
  OutputFormat format = OutputFormat::Text;

  // exact
  bool confined = false;
  std::optional<int> degree;
  std::optional<std::string> fix;
  // scan-bc
  std::optional<double> b_min, b_max;
  // ordering
  int max_nu = 5;
  int count = 0;
  // cross
  std::optional<std::string> level1, level2;
  // cross, sweep
  std::optional<std::string> vary, vary2;
  std::optional<double> from, to, from2, to2;
  int steps = 11, steps2 = 11;
  bool log_axis = false, log_axis2 = false;
  std::optional<std::string> levels;
  unsigned workers = 0;
};

/// Parses and runs one command line (argv[0] excluded). Returns 0 on success,
/// 2 on usage errors, 3 when a solver fails to converge, 1 otherwise.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace coulosc::cli
