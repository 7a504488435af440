#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bandflow::cli {

enum ExitCode : int {
    ok = 0,
    internal_error = 1,
    config_error = 2,
    numerical_refusal = 3,
    transport_ambiguity = 4,
};

/// Full command-line entry point: `bandflow <command> --config FILE
/// [--out DIR] [--threads N] [--seed U64]`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace bandflow::cli
