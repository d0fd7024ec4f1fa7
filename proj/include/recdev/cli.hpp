#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace recdev::cli {

inline constexpr char const* kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitVerification = 4;

/// Runs the `recdev` command line; args excludes the program name.
int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

}  // namespace recdev::cli
