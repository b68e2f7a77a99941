#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dppmm {

//! Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

//! Runs one subcommand (simulate, train, sample, interpolate, evaluate).
//! `args` excludes the program name.
int run_cli(const std::vector<std::string>& args,
            std::ostream& out,
            std::ostream& err);

int run_cli(int argc, char** argv);

} // namespace dppmm
