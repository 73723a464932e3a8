#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace riskbench::cli {

enum ExitCode : int { ok = 0, usage = 1, data_error = 2, numeric_error = 3 };

/// args excludes the program name. Results go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace riskbench::cli
