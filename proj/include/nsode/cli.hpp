#pragma once

#include <iosfwd>

namespace nsode {

/// Subcommands: integrate, order-study, classify, guard-check, list-problems.
/// Returns 0 on success, 1 on numerical failure, 2 on usage errors.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nsode
