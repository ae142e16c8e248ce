#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gscat::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kIoError = 3 };

/// Runs one command line (args excludes the program name). Results go to
/// `out` unless a subcommand was given --out; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace gscat::cli
