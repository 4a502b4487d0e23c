#pragma once

// Command dispatch for the superint tool. Exit codes: 0 every counted check
// passed, 1 some check failed, 2 input, usage, classification or domain error.

#include <iosfwd>

namespace superint {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitInput = 2;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace superint
