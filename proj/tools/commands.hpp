#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lmd::cli {

// Exit codes: 0 all checks pass, 1 a check failed, 2 bad input or a
// violated precondition.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lmd::cli
