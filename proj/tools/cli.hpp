#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bloc::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kRuntime = 2 };

/// Parses and runs one command. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv);

/// Reads a flat "key = value" file into "--key value" arguments. Keys already
/// present in args are skipped so command-line flags take precedence. Boolean
/// values true/false expand to a bare flag or nothing.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

}  // namespace bloc::cli
