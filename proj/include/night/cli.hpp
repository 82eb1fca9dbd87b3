#pragma once

#include <iosfwd>

namespace night::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitValidation = 4;

// Runs one `night` subcommand. Diagnostics go to `err` as a single line.
int execute(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace night::cli
