#pragma once

#include "threshold/exact.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace threshold::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line (without the program name).  Reports go to `out`
/// unless --output is given, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// start:stop:step (stop excluded), a comma list, or a single value.
std::vector<Exact> expand_grid(const std::string& spec);

}  // namespace threshold::cli
