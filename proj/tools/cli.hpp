#pragma once

#include <iosfwd>

namespace membership::cli {

/// Runs one command. JSON goes to `out`, the human summary to `err`.
/// Returns 0 on success or a feasible answer, 2 on an infeasible answer and
/// 1 on any operational error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace membership::cli
