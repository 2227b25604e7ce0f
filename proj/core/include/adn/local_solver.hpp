#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "adn/surrogate.hpp"

namespace adn {

enum class BudgetMode {
  fixed_epochs,  ///< run exactly `epochs` passes (or stop at `tolerance`)
  target_eta,    ///< certify eta against a reference solve; test and diagnostics use
};

struct SolverBudget {
  std::size_t epochs = 10;  ///< passes over the part's coordinates; the cap in target_eta mode
  std::uint64_t seed = 0;
  BudgetMode mode = BudgetMode::fixed_epochs;
  double target_eta = 0.5;
  /// Stop once no coordinate moved by more than this in a full epoch. 0 disables.
  double tolerance = 0.0;
  /// Reference solves use epochs * reference_factor passes.
  std::size_t reference_factor = 100;
};

struct LocalSolution {
  std::vector<double> delta;         ///< aligned with the subproblem's members
  std::vector<double> delta_shared;  ///< A_k delta, length d
  double decrease = 0.0;             ///< M_k(0) - M_k(delta) >= 0
  std::size_t epochs = 0;
  std::optional<double> certified_eta;
};

/// Called after every epoch with the current delta; return false to stop.
using EpochObserver = std::function<bool(std::size_t epoch, std::span<const double> delta)>;

/// Randomized proximal coordinate descent on a LocalSubproblem. Each epoch
/// visits the part's coordinates in a fresh seeded permutation and minimizes
/// the exact one-dimensional restriction of the local model, so the model
/// value never increases.
///
/// Throws InvalidBudget (epochs == 0) and NonPositiveCurvature.
LocalSolution solve_local(const LocalSubproblem& sub, const SolverBudget& budget,
                          const EpochObserver& observer = {});

/// eta = (M(delta) - M(delta*)) / (M(0) - M(delta*)), clamped below at 0.
/// Throws DegenerateSubproblem when M(0) - M(delta*) <= 1e-14.
double eta_certificate(const LocalSubproblem& sub, std::span<const double> delta,
                       std::span<const double> reference);

}  // namespace adn
