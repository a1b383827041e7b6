#ifndef RETFRONT_TOOLS_CLI_HPP
#define RETFRONT_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace retfront::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitInconclusive = 2;
inline constexpr int kExitInputError = 3;

/// Runs one command; args excludes the program name. JSON results go to
/// `out` and to files under --out; messages go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace retfront::cli

#endif  // RETFRONT_TOOLS_CLI_HPP
