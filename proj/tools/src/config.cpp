#include "adn/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "adn/error.hpp"

namespace adn::cli {

std::string_view to_string(RunMode m) noexcept {
  switch (m) {
    case RunMode::adn: return "adn";
    case RunMode::cocoa: return "cocoa";
    case RunMode::ls: return "ls";
  }
  return "unknown";
}

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(ErrorCode::config_error, "invalid value '" + std::string(value) + "' for " + std::string(key));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double to_double(std::string_view key, std::string_view v) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || std::isnan(x)) bad_value(key, v);
  return x;
}

template <class U>
U to_unsigned(std::string_view key, std::string_view v) {
  U x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v);
  return x;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  bad_value(key, v);
}

std::string fmt(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string fmt(bool b) { return b ? "true" : "false"; }

std::string_view to_string(PartitionStrategy s) {
  switch (s) {
    case PartitionStrategy::contiguous: return "contiguous";
    case PartitionStrategy::round_robin: return "round_robin";
    case PartitionStrategy::seeded_random: return "random";
  }
  return "unknown";
}

using Setter = std::function<void(RunConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"data", [](RunConfig& c, auto, auto v) { c.data = std::string(v); }},
      {"synthetic",
       [](RunConfig& c, auto, auto v) {
         if (v.empty()) {
           c.synthetic.reset();
         } else {
           c.synthetic = parse_synthetic(v);
         }
       }},
      {"layout",
       [](RunConfig& c, auto k, auto v) {
         if (v == "primal") c.layout = Layout::primal;
         else if (v == "dual") c.layout = Layout::dual;
         else bad_value(k, v);
       }},
      {"normalize", [](RunConfig& c, auto k, auto v) { c.normalize = to_bool(k, v); }},
      {"loss",
       [](RunConfig& c, auto k, auto v) {
         if (v == "least_squares" || v == "ls") c.problem.loss = LossKind::least_squares;
         else if (v == "logistic") c.problem.loss = LossKind::logistic;
         else bad_value(k, v);
       }},
      {"reg",
       [](RunConfig& c, auto k, auto v) {
         if (v == "l2") c.problem.reg = RegKind::l2;
         else if (v == "l1") c.problem.reg = RegKind::l1;
         else if (v == "elastic_net") c.problem.reg = RegKind::elastic_net;
         else bad_value(k, v);
       }},
      {"mu", [](RunConfig& c, auto k, auto v) { c.problem.mu = to_double(k, v); }},
      {"lambda", [](RunConfig& c, auto k, auto v) { c.problem.lambda = to_double(k, v); }},
      {"bound", [](RunConfig& c, auto k, auto v) { c.problem.bound = to_double(k, v); }},
      {"workers", [](RunConfig& c, auto k, auto v) { c.workers = to_unsigned<std::size_t>(k, v); }},
      {"partition",
       [](RunConfig& c, auto k, auto v) {
         if (v == "contiguous") c.partition = PartitionStrategy::contiguous;
         else if (v == "round_robin") c.partition = PartitionStrategy::round_robin;
         else if (v == "random") c.partition = PartitionStrategy::seeded_random;
         else bad_value(k, v);
       }},
      {"partition_seed", [](RunConfig& c, auto k, auto v) { c.partition_seed = to_unsigned<std::uint64_t>(k, v); }},
      {"mode",
       [](RunConfig& c, auto k, auto v) {
         if (v == "adn") c.mode = RunMode::adn;
         else if (v == "cocoa") c.mode = RunMode::cocoa;
         else if (v == "ls") c.mode = RunMode::ls;
         else bad_value(k, v);
       }},
      {"schedule",
       [](RunConfig& c, auto k, auto v) {
         if (v == "auto" || v == "parameter_free") c.trust.schedule = SigmaSchedule::parameter_free;
         else if (v == "threshold") c.trust.schedule = SigmaSchedule::threshold;
         else if (v == "fixed") c.trust.schedule = SigmaSchedule::fixed;
         else bad_value(k, v);
       }},
      {"sigma0", [](RunConfig& c, auto k, auto v) { c.trust.sigma0 = to_double(k, v); }},
      {"gamma", [](RunConfig& c, auto k, auto v) { c.trust.gamma = to_double(k, v); }},
      {"zeta", [](RunConfig& c, auto k, auto v) { c.trust.zeta = to_double(k, v); }},
      {"xi", [](RunConfig& c, auto k, auto v) { c.trust.xi = to_double(k, v); }},
      {"sigma_min", [](RunConfig& c, auto k, auto v) { c.trust.sigma_min = to_double(k, v); }},
      {"sigma_max", [](RunConfig& c, auto k, auto v) { c.trust.sigma_max = to_double(k, v); }},
      {"allow_zero_xi", [](RunConfig& c, auto k, auto v) { c.trust.allow_zero_xi = to_bool(k, v); }},
      {"sigma_fixed",
       [](RunConfig& c, auto k, auto v) {
         if (v.empty() || v == "auto") {
           c.sigma_fixed.reset();
         } else {
           c.sigma_fixed = to_double(k, v);
         }
       }},
      {"epochs", [](RunConfig& c, auto k, auto v) { c.epochs = to_unsigned<std::size_t>(k, v); }},
      {"seed", [](RunConfig& c, auto k, auto v) { c.seed = to_unsigned<std::uint64_t>(k, v); }},
      {"threads",
       [](RunConfig& c, auto k, auto v) {
         if (v == "concurrent") c.multiplexed = false;
         else if (v == "multiplexed") c.multiplexed = true;
         else bad_value(k, v);
       }},
      {"max_rounds", [](RunConfig& c, auto k, auto v) { c.max_rounds = to_unsigned<std::size_t>(k, v); }},
      {"gap_tol", [](RunConfig& c, auto k, auto v) { c.gap_tol = to_double(k, v); }},
      {"ls_c1", [](RunConfig& c, auto k, auto v) { c.ls.c1 = to_double(k, v); }},
      {"ls_backtrack", [](RunConfig& c, auto k, auto v) { c.ls.backtrack = to_double(k, v); }},
      {"ls_max_backtracks", [](RunConfig& c, auto k, auto v) { c.ls.max_backtracks = to_unsigned<std::size_t>(k, v); }},
      {"metrics", [](RunConfig& c, auto, auto v) { c.metrics = std::string(v); }},
      {"summary", [](RunConfig& c, auto, auto v) { c.summary = std::string(v); }},
  };
  return table;
}

}  // namespace

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw Error(ErrorCode::config_error, "unknown setting '" + std::string(key) + "'");
  it->second(cfg, key, value);
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  std::size_t lineno = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::config_error, "line " + std::to_string(lineno) + ": expected key=value");
    }
    apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

std::string serialize_config(const RunConfig& c) {
  std::vector<std::pair<std::string, std::string>> kv = {
      {"data", c.data},
      {"synthetic", c.synthetic ? serialize_synthetic(*c.synthetic) : std::string()},
      {"layout", std::string(to_string(c.layout))},
      {"normalize", fmt(c.normalize)},
      {"loss", std::string(to_string(c.problem.loss))},
      {"reg", std::string(to_string(c.problem.reg))},
      {"mu", fmt(c.problem.mu)},
      {"lambda", fmt(c.problem.lambda)},
      {"bound", fmt(c.problem.bound)},
      {"workers", std::to_string(c.workers)},
      {"partition", std::string(to_string(c.partition))},
      {"partition_seed", std::to_string(c.partition_seed)},
      {"mode", std::string(to_string(c.mode))},
      {"schedule", std::string(to_string(c.trust.schedule))},
      {"sigma0", fmt(c.trust.sigma0)},
      {"gamma", fmt(c.trust.gamma)},
      {"zeta", fmt(c.trust.zeta)},
      {"xi", fmt(c.trust.xi)},
      {"sigma_min", fmt(c.trust.sigma_min)},
      {"sigma_max", fmt(c.trust.sigma_max)},
      {"allow_zero_xi", fmt(c.trust.allow_zero_xi)},
      {"sigma_fixed", c.sigma_fixed ? fmt(*c.sigma_fixed) : std::string("auto")},
      {"epochs", std::to_string(c.epochs)},
      {"seed", std::to_string(c.seed)},
      {"threads", c.multiplexed ? "multiplexed" : "concurrent"},
      {"max_rounds", std::to_string(c.max_rounds)},
      {"gap_tol", fmt(c.gap_tol)},
      {"ls_c1", fmt(c.ls.c1)},
      {"ls_backtrack", fmt(c.ls.backtrack)},
      {"ls_max_backtracks", std::to_string(c.ls.max_backtracks)},
      {"metrics", c.metrics},
      {"summary", c.summary},
  };
  std::string out;
  for (const auto& [k, v] : kv) out += k + '=' + v + '\n';
  return out;
}

SyntheticSpec parse_synthetic(std::string_view text) {
  SyntheticSpec s;
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string_view item = trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) bad_value("synthetic", item);
    const auto k = trim(item.substr(0, eq));
    const auto v = trim(item.substr(eq + 1));
    if (k == "d") s.d = to_unsigned<std::size_t>(k, v);
    else if (k == "n") s.n = to_unsigned<std::size_t>(k, v);
    else if (k == "density") s.density = to_double(k, v);
    else if (k == "correlation") s.correlation = to_double(k, v);
    else if (k == "sparsity") s.sparsity = to_double(k, v);
    else if (k == "noise") s.noise = to_double(k, v);
    else if (k == "seed") s.seed = to_unsigned<std::uint64_t>(k, v);
    else throw Error(ErrorCode::config_error, "unknown synthetic key '" + std::string(k) + "'");
  }
  return s;
}

std::string serialize_synthetic(const SyntheticSpec& s) {
  return "d=" + std::to_string(s.d) + ",n=" + std::to_string(s.n) + ",density=" + fmt(s.density) +
         ",correlation=" + fmt(s.correlation) + ",sparsity=" + fmt(s.sparsity) + ",noise=" + fmt(s.noise) +
         ",seed=" + std::to_string(s.seed);
}

void RunConfig::validate() const {
  if (workers == 0) throw Error(ErrorCode::invalid_k, "workers must be at least 1");
  if (data.empty() == !synthetic.has_value()) {
    throw Error(ErrorCode::config_error, "give exactly one of a data path or a synthetic spec");
  }
  if (epochs == 0) throw Error(ErrorCode::config_error, "epochs must be at least 1");
  if (!(gap_tol >= 0.0)) throw Error(ErrorCode::config_error, "gap_tol must be non-negative");
  if (sigma_fixed && !(*sigma_fixed > 0.0)) throw Error(ErrorCode::config_error, "sigma_fixed must be positive");
  if (trust.schedule == SigmaSchedule::fixed && mode == RunMode::adn) {
    TrustConfig t = trust;
    t.sigma0 = sigma_fixed.value_or(trust.sigma0);
    t.validate();
  } else {
    trust.validate();
  }
}

}  // namespace adn::cli
