#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mimo::cli {

/// Runs one subcommand. `args` excludes the program name. Returns the
/// process exit code; diagnostics go to `err`, summaries to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mimo::cli
