#pragma once

#include <iosfwd>

namespace hsi::cli {

/// Entry point behind the `hsi` executable. Returns 0 on success, 1 on usage
/// errors (bad flags, bad config keys), 2 on data errors (unreadable or
/// inconsistent inputs, degenerate splits).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hsi::cli
