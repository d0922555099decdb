#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace extkit::cli {

/// Runs one command line (without the program name). Reports go to `out`,
/// diagnostics to `err`. Returns 0 when every gate passes, 1 when a gate
/// fails and 2 on invalid input.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace extkit::cli
