#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace badmm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;  // I/O or unexpected failure
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNonconvergence = 3;
inline constexpr int kExitRejected = 4;  // verify found the certificate invalid

// args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace badmm
