#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace krauslab::cli {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kInvalidInput = 2,
};

/// Column names of the sweep table, in order.
inline constexpr const char* kSweepHeader =
    "t,r(t),theta(t),phi(t),r_t,delta_rho_maxnorm,completeness_residual,"
    "reconstruction_residual,trace_distance_analytic_vs_numeric";

/// Runs the command line; args[0] is the program name. Results go to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace krauslab::cli
