#pragma once

namespace eulerlab::cli {

inline constexpr int kOk = 0;
inline constexpr int kVerificationFailure = 1;
inline constexpr int kUsageError = 2;
inline constexpr int kNumericalFailure = 3;

// Full command dispatch; argv[0] is the program name. Returns the process
// exit code per the contract above.
int run(int argc, const char* const* argv);

}  // namespace eulerlab::cli
