#include "adn/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <json.hpp>

namespace adn {

namespace {

std::string real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// JSON has no inf/nan; emit null for them.
nlohmann::json json_real(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

}  // namespace

std::string format_metrics_row(const MetricsRecord& rec) {
  std::string row = std::to_string(rec.round);
  row += ',' + real(rec.objective);
  row += ',' + real(rec.gap);
  row += ',' + real(rec.sigma);
  row += ',' + (rec.rho ? real(*rec.rho) : std::string());
  row += rec.accepted ? ",1" : ",0";
  row += ',' + std::to_string(rec.bytes_up);
  row += ',' + std::to_string(rec.bytes_down);
  char ms[32];
  std::snprintf(ms, sizeof ms, "%.3f", rec.elapsed_ms);
  row += ',';
  row += ms;
  return row;
}

void write_metrics_csv(std::ostream& out, std::span<const MetricsRecord> records) {
  out << kMetricsHeader << '\n';
  for (const auto& rec : records) out << format_metrics_row(rec) << '\n';
}

std::string summary_json(const RunResult& result, std::string_view mode, std::string_view config) {
  nlohmann::json j;
  j["mode"] = mode;
  j["stop_reason"] = to_string(result.reason);
  j["rounds"] = result.totals.rounds;
  j["accepted"] = result.totals.accepted;
  j["rejected"] = result.totals.rejected;
  j["bytes_up"] = result.totals.bytes_up;
  j["bytes_down"] = result.totals.bytes_down;
  j["initial_objective"] = json_real(result.initial_objective);
  j["initial_gap"] = json_real(result.initial_gap);
  j["objective"] = json_real(result.objective);
  j["gap"] = json_real(result.gap);
  j["sigma_max_seen"] = json_real(result.sigma_max_seen);
  j["elapsed_ms"] = result.metrics.empty() ? 0.0 : result.metrics.back().elapsed_ms;
  if (!config.empty()) j["config"] = config;
  return j.dump(2);
}

std::string summary_line(const RunResult& result) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "rounds=%zu accepted=%zu rejected=%zu objective=%.10g gap=%.3e bytes=%llu stop=%s",
                result.totals.rounds, result.totals.accepted, result.totals.rejected, result.objective, result.gap,
                static_cast<unsigned long long>(result.totals.bytes_up + result.totals.bytes_down),
                std::string(to_string(result.reason)).c_str());
  return buf;
}

}  // namespace adn
