#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace redraw::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;    // invalid input, I/O or numerical failure
inline constexpr int kUsage = 2;      // bad command line
inline constexpr int kUnlocked = 3;   // experiments failed the phase-lock check

/// Runs one command line (without the program name). Summaries go to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace redraw::cli
