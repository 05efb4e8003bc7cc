#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mkq {

/// Exit codes: 0 success, 2 configuration error, 1 runtime failure.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mkq
