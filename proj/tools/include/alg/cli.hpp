#pragma once

// Entry point of the `alg` command-line tool, callable in-process.

#include <iosfwd>
#include <string>
#include <vector>

namespace alg::cli {

enum ExitCode : int { ok = 0, invalid_config = 2, numerical_abort = 3, io_error = 4 };

/// args excludes the program name, e.g. {"stability", "eigen", "--phi", "0.7"}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace alg::cli
