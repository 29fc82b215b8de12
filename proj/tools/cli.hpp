#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dnbs::cli {

enum Exit : int { ok = 0, usage = 1, io = 2, numeric = 3 };

/// Runs one command line (args[0] is the program name) and returns the exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dnbs::cli
