#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "adn/engine.hpp"

namespace adn {

inline constexpr std::string_view kMetricsHeader =
    "round,objective,gap,sigma,rho,accepted,bytes_up,bytes_down,elapsed_ms";

/// One CSV row without the trailing newline. Reals use %.17g so rows
/// round-trip exactly; a degenerate rho is written as an empty field.
std::string format_metrics_row(const MetricsRecord& rec);

void write_metrics_csv(std::ostream& out, std::span<const MetricsRecord> records);

/// Run summary as a JSON object; `mode` and `config` (already serialized) are
/// echoed verbatim.
std::string summary_json(const RunResult& result, std::string_view mode, std::string_view config = {});

/// "rounds=.. accepted=.. gap=.. bytes=.." for the console.
std::string summary_line(const RunResult& result);

}  // namespace adn
