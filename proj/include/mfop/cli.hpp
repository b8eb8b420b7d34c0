#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mfop::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. `args` excludes the program name.
/// Exit code: 0 when every pass flag holds, 1 on a failed flag or experiment error, 2 on usage errors.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mfop::cli
