#pragma once

#include <iosfwd>

namespace sdae {

// Command-line entry point, callable in-process (the sdae binary is a thin
// wrapper). Writes a human summary followed by a "--- report ---" JSON
// section whose bytes depend only on the inputs, flags, and seed.
//
// Exit codes: 0 when the command succeeds and any checked property holds,
// 1 for domain failures (irregular pencil, failed comparison, ill-conditioned
// reduction, inconsistent network), 2 for usage, parse, or file errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace sdae
