#pragma once

#include <iosfwd>

namespace spread {

/// Runs one command line. Exit codes: 0 success, 1 invalid input or
/// configuration, 2 runtime failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spread
