#ifndef LINCG_CLI_CLI_HPP
#define LINCG_CLI_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace lincg::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kError = 1;
inline constexpr int kIterationCap = 2;
inline constexpr int kBreakdown = 3;
inline constexpr int kCheckFailed = 4;

/// Runs one invocation. args excludes the program name, e.g. {"solve", "--builtin", "hilbert"}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lincg::cli

#endif  // LINCG_CLI_CLI_HPP
