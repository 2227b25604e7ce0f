#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "adn/cli/config.hpp"
#include "adn/engine.hpp"

namespace adn::cli {

/// Exit codes of the `adn` tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitNonFinite = 2;

/// Loads the data, runs the configured engine and writes the metrics CSV and
/// JSON summary. Library errors propagate as adn::Error.
RunResult execute(const RunConfig& cfg, std::ostream& log);

/// Entry point shared by the binary and the tests. `args` excludes argv[0].
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace adn::cli
