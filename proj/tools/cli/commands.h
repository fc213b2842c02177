#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ampkin::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitError = 2;

/// Runs the tool with `args` (program name excluded). Regular output goes
/// to `out`; failures are reported on `err` as a single JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ampkin::cli
