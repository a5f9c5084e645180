#pragma once

#include <ostream>
#include <string>

namespace divergelab::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the divergelab tool. Commands: eval, suite, counterexample.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// 12 significant digits; integral values keep a trailing ".0", infinities print as "inf".
std::string format_value(double v);

}  // namespace divergelab::cli
