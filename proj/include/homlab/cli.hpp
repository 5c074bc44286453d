#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace homlab {

// Runs one CLI invocation. Subcommands: analytic, oracle, scan, sync, fit,
// presets. Returns 0 on success, 2 on validation/usage errors, 3 on numerical
// failures; errors go to `err` with a machine-readable code tag.
int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);

}  // namespace homlab
