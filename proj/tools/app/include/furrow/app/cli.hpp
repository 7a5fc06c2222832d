#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace furrow::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitProcessing = 2;

/// Runs the furrow command line. args excludes the program name. Results go
/// to `out`, usage text and log lines to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace furrow::app
