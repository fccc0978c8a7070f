#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "adopt/config.hpp"

namespace adopt::cli {

// Runs one command line (without the program name). Exit codes: 0 ok,
// 1 data error, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const EnvLookup& env = process_env);

}  // namespace adopt::cli
