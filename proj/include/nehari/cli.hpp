#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nehari {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNonConvergence = 2;
inline constexpr int kExitUntrusted = 3;

/// Runs the experiment CLI on argv-style arguments (without the program name).
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace nehari
