#ifndef CARMTRACK_TOOLS_CLI_HPP
#define CARMTRACK_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace carmtrack::cli {

enum ExitCode : int {
    kOk = 0,
    kValidationError = 2,  ///< bad arguments, schema, config or gaze grid
    kSolverError = 3,      ///< hand-eye failure, unreachable bull's-eye
    kIoError = 4,
};

/// Runs one command line (without the program name). Reports go to --out or @p out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace carmtrack::cli

#endif  // CARMTRACK_TOOLS_CLI_HPP
