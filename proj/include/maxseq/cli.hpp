#pragma once

#include <ostream>

namespace maxseq {

/// Entry point of the `maxseq` tool. Subcommands: simulate, unitroot,
/// whitenoise, montecarlo, limits. Returns 0 on success, 1 on usage or
/// validation errors and 2 on numerical/runtime failures.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace maxseq
