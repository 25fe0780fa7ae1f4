#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace helmetkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. `args` excludes the program name. Returns the process
/// exit status: 0 success, 1 validation findings or bad input, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace helmetkit::cli
