#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace ags::testing {

struct CliStep {
  std::string name;
  std::vector<std::string> args;
  int exit_code = 0;
  nlohmann::json output;  // parsed --json output
};

// Runs the full contract lifecycle through the CLI in embedded mode inside
// `dir`: keys, policy, contract, propose (U=99.1), observe, reject,
// resubmit (U=99.4), three approvals, timeline, certificate and chain
// verification. Timestamps are pinned so the output is reproducible.
std::vector<CliStep> run_cli_flow(const std::string& dir);

CliStep run_cli(const std::string& name, std::vector<std::string> args, const std::string& dir);

}  // namespace ags::testing
