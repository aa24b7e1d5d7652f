#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace otcimpact {

/// Exit codes of the command line front end.
enum ExitCode : int { kExitOk = 0, kExitDataError = 1, kExitUsage = 2 };

/// Runs one subcommand. argv[0] is the program name. Data errors print a
/// JSON object {"error": {code, message, field, line}} on err.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace otcimpact
