#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kspin {

// Entry point of the `kspin` tool. Subcommands: generate, sample, fit,
// experiment, genes, diag. Returns the process exit code: 0 success,
// 1 validation, 2 runtime or numeric failure, 3 I/O.
//
// Every subcommand except `experiment` accepts `--config file.json`, an
// object whose keys are flag names (with or without the leading dashes,
// underscores allowed for dashes). Flags given on the command line win.
// For `experiment`, `--config` names the experiment manifest.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kspin
