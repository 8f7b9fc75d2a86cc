#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace morphsweep {

enum exit_code : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_runtime = 2,
};

// Entry point of the morphsweep command line. `args` excludes the program
// name. Data goes to `out` (or to files); progress and diagnostics go to
// `status`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& status);

}  // namespace morphsweep
