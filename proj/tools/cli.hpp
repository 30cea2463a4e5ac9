#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tpd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitCorruptModel = 3;

/// Runs one `tpdcopod` invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tpd::cli
