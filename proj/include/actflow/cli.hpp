#ifndef ACTFLOW_CLI_HPP_
#define ACTFLOW_CLI_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "actflow/coefficients.hpp"

namespace actflow {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,  // property, tolerance or audit failure
  kExitUsage = 2,        // bad arguments, config or file errors
  kExitSolver = 3,       // solver abort
};

struct CliOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::vector<int> k_list;
  std::optional<int> samples;
  std::string scenario;  // bench
  std::string preset;    // verify-graphs
};

int cmd_simulate(const CliOptions& opt, std::ostream& out, std::ostream& err);
/// `override_set` replaces the coefficients otherwise taken from --config/--preset.
int cmd_verify_graphs(const CliOptions& opt, std::ostream& out, std::ostream& err,
                      const CoefficientSet* override_set = nullptr);
int cmd_bench(const CliOptions& opt, std::ostream& out, std::ostream& err);
int cmd_audit(const CliOptions& opt, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to the subcommands.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace actflow

#endif  // ACTFLOW_CLI_HPP_
