#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rmf::cli {

enum ExitCode : int { ok = 0, checks_failed = 1, validation_error = 2, numerical_error = 3 };

/// Entry point of the rmframe tool; `args` excludes the program name.
/// Subcommands: frames, transport, surface, report, holonomy.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rmf::cli
