#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace agentrec::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitSchema = 2;
inline constexpr int kExitMissingOutput = 3;

// The `agentrec` command line. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace agentrec::cli
