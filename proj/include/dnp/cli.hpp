#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dnp::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kSolverError = 3 };

// args excludes the program name. Thread count comes from DNP_NUM_THREADS when set.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dnp::cli
