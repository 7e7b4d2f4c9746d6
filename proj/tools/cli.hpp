#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cf::cli {

// Exit codes of run().
inline constexpr int kOk = 0;
inline constexpr int kValidation = 1;
inline constexpr int kNumeric = 2;

// Runs the command line args (without the program name). Primary output goes
// to out unless --out is given; diagnostics go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cf::cli
