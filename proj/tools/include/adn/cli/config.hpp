#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "adn/data.hpp"
#include "adn/engine.hpp"
#include "adn/local_solver.hpp"
#include "adn/sparse.hpp"
#include "adn/trust.hpp"

namespace adn::cli {

enum class RunMode { adn, cocoa, ls };

std::string_view to_string(RunMode m) noexcept;

/// Flat run description. Every field has a key of the same name in the
/// key=value config file and a matching command line flag.
struct RunConfig {
  // data source: exactly one of `data` or `synthetic`
  std::string data;
  std::optional<SyntheticSpec> synthetic;
  Layout layout = Layout::primal;
  bool normalize = true;

  ProblemParams problem;

  std::size_t workers = 4;
  PartitionStrategy partition = PartitionStrategy::contiguous;
  std::uint64_t partition_seed = 0;

  RunMode mode = RunMode::adn;
  TrustConfig trust;
  std::optional<double> sigma_fixed;  ///< fixed schedule sigma, or CoCoA's sigma (default K)

  std::size_t epochs = 10;
  std::uint64_t seed = 0;
  bool multiplexed = false;

  std::size_t max_rounds = 100;
  double gap_tol = 1e-6;

  LineSearchConfig ls;

  std::string metrics;  ///< CSV path; empty disables
  std::string summary;  ///< JSON path; empty disables

  /// Throws ConfigError (or InvalidK for workers == 0).
  void validate() const;
};

/// Applies one key=value setting. Throws ConfigError for unknown keys or
/// unparsable values.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

/// Reads a key=value file body: one setting per line, `#` starts a comment.
RunConfig parse_config(std::string_view text, RunConfig base = {});

/// Canonical form: every key in a fixed order with shortest round-trip numbers.
std::string serialize_config(const RunConfig& cfg);

/// "d=50,n=200,density=0.1" into a SyntheticSpec; keys not given keep defaults.
SyntheticSpec parse_synthetic(std::string_view text);
std::string serialize_synthetic(const SyntheticSpec& spec);

}  // namespace adn::cli
