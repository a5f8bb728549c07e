#pragma once

#include <string>
#include <vector>

namespace catmix {

// Parses and runs one CLI invocation (argv without the program name).
// Report text goes to `out`, diagnostics to `err`; the return value is the
// process exit code: 0 success, 2 parse or config error, 3 mathematical
// precondition violated, 4 numerical ambiguity budget exhausted.
int run_cli(const std::vector<std::string>& args, std::string& out, std::string& err);

}  // namespace catmix
