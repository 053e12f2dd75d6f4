#ifndef MVOE_TOOLS_COMMANDS_HPP
#define MVOE_TOOLS_COMMANDS_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace mvoe::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kParseError = 2,
  kNumericError = 3,
  kSingularMap = 4,
  kUnsupportedDimension = 5,
};

/// Command-line overrides of the problem file's solver options.
struct SolverFlags {
  std::optional<std::string> method;
  std::optional<double> tolerance;
  std::optional<int> max_iterations;
  bool time = false;
};

struct SumArgs {
  std::string input;
  std::string output;
  SolverFlags solver;
  bool check = false;
  std::uint64_t seed = 0;
  int directions = 1000;
};

struct ReachArgs {
  std::string input;
  std::string output;
  SolverFlags solver;
};

struct BoundaryArgs {
  std::string input;
  std::string output;
  std::size_t samples = 64;
  bool indexed = false;
};

struct CheckArgs {
  std::string input;
  SolverFlags solver;
  std::uint64_t seed = 0;
  int directions = 1000;
};

int cmd_sum(const SumArgs& args, std::ostream& err);
int cmd_reach(const ReachArgs& args, std::ostream& err);
int cmd_boundary(const BoundaryArgs& args, std::ostream& err);
int cmd_check(const CheckArgs& args, std::ostream& out, std::ostream& err);

/// Full command line dispatch; returns the process exit code.
int run(int argc, char** argv);

}  // namespace mvoe::cli

#endif  // MVOE_TOOLS_COMMANDS_HPP
