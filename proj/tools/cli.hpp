#pragma once

#include <iosfwd>

namespace dynrank::cli {

/// Runs the dynrank command line. Returns the process exit code; 0 on
/// success, nonzero with a diagnostic on `err` otherwise.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dynrank::cli
