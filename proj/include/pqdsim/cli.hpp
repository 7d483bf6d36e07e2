#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pqdsim {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitQuantitativeFail = 1,
    kExitUsage = 2,  // bad arguments, invalid config, oracle guard
    kExitRefused = 3,  // simulability refusal
};

std::string tool_version();

/// Runs the tool on argv-style arguments (args[0] is the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace pqdsim
