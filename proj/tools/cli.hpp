#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace superhedge::cli {

enum ExitCode { Ok = 0, Unexpected = 1, Config = 2, Data = 3, Arbitrage = 4, Solver = 5 };

/// Runs one command line (without the program name). JSON results go to `out`
/// unless --out redirects them; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace superhedge::cli
