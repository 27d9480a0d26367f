#pragma once

#include <iosfwd>

namespace cadence {

inline constexpr const char* kToolVersion = "0.1.0";

// Runs one subcommand. Returns 0 on success, 1 on usage or configuration
// errors (after printing help), 2 when input data cannot be used.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cadence
