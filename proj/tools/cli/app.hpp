#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace phasebeam::cli {

/// Runs one command line (without the program name). Returns the process exit
/// code: 0 on success, the ErrorCode value for typed failures, 1 for usage
/// errors and anything unexpected.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace phasebeam::cli
