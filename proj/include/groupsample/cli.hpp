#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace groupsample::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInfeasible = 3;  // no compliant generator / infeasible constraint
inline constexpr int kExitNonConvergence = 4;

/// Runs the groupresample command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace groupsample::cli
