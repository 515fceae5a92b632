#ifndef SQHBT_TOOLS_CLI_HPP
#define SQHBT_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace sqhbt::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_config = 2,
    exit_io = 3,
    exit_no_signal = 4,
    exit_internal = 5,
};

/// Runs the command line `args` (program name excluded).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sqhbt::cli

#endif
