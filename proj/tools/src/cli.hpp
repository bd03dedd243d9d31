#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dmcp::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 2,
  kConvergence = 3,
  kData = 4,
};

/// Runs the dmcp command line. `args` excludes the program name. Results go
/// to --out, to $DMCP_OUT_DIR, or to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "pi", "pi/2", "3pi/4", "2*pi/3", "-pi" or a plain number.
double parse_angle(const std::string& text);

/// "start:stop:step" (inclusive) or a comma-separated list.
std::vector<double> parse_samples(const std::string& text);

std::vector<double> parse_list(const std::string& text);

}  // namespace dmcp::cli
