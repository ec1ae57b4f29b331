#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ags::cli {

enum ExitCode : int { ok = 0, usage = 1, verification = 2, io = 3 };

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

EnvLookup process_env();

// args excludes the program name. Output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env = process_env());

}  // namespace ags::cli
