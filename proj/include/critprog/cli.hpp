#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace critprog::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2 };

/// Runs one subcommand (`fit`, `classify`, `backtest`, `sweep`, `synth`).
/// `args` excludes the program name. Reports go to `out` unless --output is
/// given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace critprog::cli
