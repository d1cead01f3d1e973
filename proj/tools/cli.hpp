#pragma once

#include <iosfwd>

namespace linkforge::cli {

/// Runs the linkforge command line. Returns 0 on success, 1 on invalid input
/// or usage, 2 on I/O or encoder transport failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace linkforge::cli
