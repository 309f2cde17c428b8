#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pwdyn::cli {

/// Runs one command line (without the program name). Returns 0, 1 on runtime failure, 2 on config errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pwdyn::cli
