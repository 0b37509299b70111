#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "viscoctrl_cli/config.hpp"

namespace viscoctrl::cli {

/// Output files of one run: (file name, content) in emission order.
using Outputs = std::vector<std::pair<std::string, std::string>>;

Outputs cmd_resolvent(const RunConfig& config);
Outputs cmd_simulate(const RunConfig& config);
Outputs cmd_control(const RunConfig& config);
Outputs cmd_verify(const RunConfig& config);
Outputs cmd_sweep(const RunConfig& config);

/// Dispatches on resolvent | simulate | control | verify | sweep.
Outputs run_verb(const std::string& verb, const RunConfig& config);

/// Writes every file to a temporary sibling first and renames only after all
/// writes succeeded; on failure no target file is created or replaced.
void commit_outputs(const std::filesystem::path& out_dir, const Outputs& outputs);

/// Process exit status for the exception currently being handled:
/// 2 configuration, 3 numerical guard, 4 I/O, 1 anything else.
int exit_code_for_current_exception() noexcept;

}  // namespace viscoctrl::cli
