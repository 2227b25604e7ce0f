#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "adn/local_solver.hpp"
#include "adn/objectives.hpp"
#include "adn/sparse.hpp"
#include "adn/trust.hpp"

namespace adn {

struct StopCriteria {
  std::size_t max_rounds = 100;
  double gap_tol = 0.0;  ///< stop once the duality gap is <= gap_tol; 0 disables
  std::optional<double> optimum;
  double subopt_tol = 0.0;  ///< used only with `optimum`
};

enum class StopReason {
  max_rounds,
  gap_tolerance,
  suboptimality_tolerance,
  stationary,  ///< the round's model decrease vanished
  stalled,     ///< a rejection with sigma pinned at sigma_max, or an exhausted line search
};

std::string_view to_string(StopReason r) noexcept;

/// One row of the metrics stream. Byte counters are cumulative.
struct MetricsRecord {
  std::size_t round = 0;  ///< 1-based
  double objective = 0.0;
  double gap = 0.0;
  double sigma = 0.0;  ///< sigma used in this round
  std::optional<double> rho;
  bool accepted = false;
  std::uint64_t bytes_up = 0;
  std::uint64_t bytes_down = 0;
  double elapsed_ms = 0.0;
};

struct RunTotals {
  std::size_t rounds = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::uint64_t bytes_up = 0;
  std::uint64_t bytes_down = 0;
};

struct RunResult {
  std::vector<MetricsRecord> metrics;
  std::vector<double> alpha;
  std::vector<double> shared;  ///< v at exit
  double initial_objective = 0.0;
  double initial_gap = 0.0;
  double objective = 0.0;
  double gap = 0.0;
  RunTotals totals;
  StopReason reason = StopReason::max_rounds;
  double sigma_max_seen = 0.0;  ///< largest sigma used by any round
};

/// Everything the master learned in one round, for tests and diagnostics.
struct RoundEvent {
  std::size_t round = 0;
  double sigma = 0.0;
  double objective_old = 0.0;
  double objective_new = 0.0;   ///< O(alpha + delta) for the full step
  double model_value = 0.0;     ///< sum_k M_k(delta_k)
  double model_decrease = 0.0;  ///< sum_k local_decrease_k
  double actual_decrease = 0.0;
  double curvature_model = 0.0;   ///< sigma/2 sum_k dv_k^T D dv_k
  double curvature_actual = 0.0;  ///< f(v + dv) - f(v) - grad^T dv
  RoundDecision decision;
  double step = 1.0;  ///< line-search step; 1 otherwise
  std::size_t backtracks = 0;
  std::optional<double> max_certified_eta;
  /// Proposed full-length delta and the iterate after the round. Gathered
  /// from the workers only because an observer is attached.
  std::span<const double> delta;
  std::span<const double> alpha;
};

using RoundObserver = std::function<void(const RoundEvent&)>;

enum class Threading {
  concurrent,   ///< one thread per worker per stage
  multiplexed,  ///< all workers on the calling thread
};

struct EngineOptions {
  std::uint64_t seed = 0;
  Threading threading = Threading::concurrent;
  std::optional<std::vector<double>> alpha0;
  /// Recompute v = A alpha after accepted rounds and throw
  /// InconsistentSharedVector on drift.
  bool verify_shared = kDebugChecks;
  RoundObserver observer;
  /// Called before every local solve with the worker's private copy of the
  /// full iterate. A worker must only read its own coordinates; tests use this
  /// to scribble over the rest.
  std::function<void(std::size_t round, std::size_t part, std::span<double> private_alpha)> tamper;
};

struct LineSearchConfig {
  double c1 = 1e-4;
  double backtrack = 0.5;
  std::size_t max_backtracks = 30;
};

/// Adaptive distributed Newton. Each round the workers minimize their block
/// of the sigma-scaled surrogate from a frozen snapshot of v, send
/// (A_k delta_k, g sums, model values) to the master, which forms rho from
/// those alone, accepts or rejects, and adapts sigma.
RunResult run_adn(const ProblemSpec& spec, const SparseColMatrix& a, const Partition& partition,
                  const TrustConfig& trust, const SolverBudget& budget, const StopCriteria& stop,
                  const EngineOptions& options = {});

/// CoCoA baseline: curvature (1/tau) I, fixed sigma (default K), every round
/// accepted.
RunResult run_cocoa(const ProblemSpec& spec, const SparseColMatrix& a, const Partition& partition,
                    std::optional<double> sigma_fixed, const SolverBudget& budget, const StopCriteria& stop,
                    const EngineOptions& options = {});

/// Block-diagonal Newton model at sigma = 1 plus Armijo backtracking on the
/// step size. Each backtrack costs one extra distributed objective evaluation.
RunResult run_line_search(const ProblemSpec& spec, const SparseColMatrix& a, const Partition& partition,
                          const SolverBudget& budget, const StopCriteria& stop,
                          const LineSearchConfig& ls = {}, const EngineOptions& options = {});

}  // namespace adn
