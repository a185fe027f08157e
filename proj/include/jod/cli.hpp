#pragma once

#include <iosfwd>

namespace jod::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kValidation = 2;
inline constexpr int kNumerical = 3;
inline constexpr int kIo = 4;

// Entry point of the `jod` tool: simulate, fit, diagnose, oracle, budget.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace jod::cli
