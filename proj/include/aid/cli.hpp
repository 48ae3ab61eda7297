#ifndef AID_CLI_HPP
#define AID_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace aid {

// Runs the command-line interface on the given arguments (without argv[0]).
// Exit codes: 0 success, 1 diagnostics, 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace aid

#endif  // AID_CLI_HPP
