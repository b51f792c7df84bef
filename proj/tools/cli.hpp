#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ipca::cli {

/// Runs the `ipca` command line. `args` excludes the program name. Returns the
/// process exit code: 0 success, 1 internal error, 2 user or config error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ipca::cli
