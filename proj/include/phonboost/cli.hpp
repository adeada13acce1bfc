#ifndef PHONBOOST_CLI_HPP_
#define PHONBOOST_CLI_HPP_
#pragma once

#include <ostream>

namespace phonboost {

/// Exit codes of the command-line tool.
enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_data = 2, exit_internal = 3 };

/**
 * @brief Entry point of the `phonboost` tool, with its streams injectable for tests.
 *
 * Subcommands: run, extract, synth. Returns one of ExitCode.
 */
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace phonboost

#endif  // PHONBOOST_CLI_HPP_
