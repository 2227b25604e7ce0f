#include "adn/local_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "adn/error.hpp"
#include "adn/random.hpp"

namespace adn {

namespace {

LocalSolution coordinate_descent(const LocalSubproblem& sub, std::size_t epochs, std::uint64_t seed,
                                 double tolerance, const EpochObserver& observer) {
  const auto& a = sub.matrix();
  const auto& snap = sub.snapshot();
  const auto& reg = sub.reg();
  const auto members = sub.members();
  const auto alpha = sub.alpha();
  const std::size_t nk = members.size();
  const double sigma = sub.sigma();
  const double damping = sub.damping();

  // D is frozen for the round, so curvature and the gradient part of the
  // linear term are fixed per coordinate.
  std::vector<double> curvature(nk);
  std::vector<double> grad_dot(nk);
  for (std::size_t p = 0; p < nk; ++p) {
    curvature[p] = sigma * a.col_weighted_sq_norm(members[p], snap.curvature) + damping;
    if (curvature[p] < 0.0 || std::isnan(curvature[p])) {
      throw Error(ErrorCode::non_positive_curvature,
                  "coordinate " + std::to_string(members[p]) + " has curvature " + std::to_string(curvature[p]));
    }
    grad_dot[p] = a.col_dot(members[p], snap.gradient);
  }

  LocalSolution out;
  out.delta.assign(nk, 0.0);
  auto& delta = out.delta;
  std::vector<double> weighted_image(a.rows(), 0.0);  // D o (A_k delta)
  std::vector<std::size_t> order(nk);
  std::iota(order.begin(), order.end(), std::size_t{0});
  detail::Rng rng(seed);

  for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
    for (std::size_t i = nk; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    double largest_step = 0.0;
    for (std::size_t p : order) {
      const std::size_t col = members[p];
      const double linear = grad_dot[p] + sigma * a.col_dot(col, weighted_image) + damping * delta[p];
      const double current = alpha[p] + delta[p];
      double next;
      if (curvature[p] > 0.0) {
        next = reg.prox(current - linear / curvature[p], 1.0 / curvature[p]);
      } else {
        if (linear == 0.0) continue;
        // Flat quadratic: minimize linear * x + g(x), i.e. x in dg*(-linear).
        next = reg.conjugate_subgradient(-linear);
        if (!std::isfinite(next)) continue;
      }
      // alpha + delta must land inside dom g after rounding, or the
      // regularizer sum the worker reports becomes +inf.
      double total = next - alpha[p];
      for (int nudge = 0; nudge < 4 && !std::isfinite(reg.value(alpha[p] + total)); ++nudge) {
        total = std::nextafter(total, 0.0);
      }
      const double step = total - delta[p];
      if (step == 0.0) continue;
      delta[p] += step;
      const auto rows = a.col_rows(col);
      const auto vals = a.col_values(col);
      for (std::size_t q = 0; q < rows.size(); ++q) weighted_image[rows[q]] += snap.curvature[rows[q]] * vals[q] * step;
      largest_step = std::max(largest_step, std::abs(step));
    }
    out.epochs = epoch;
    if (observer && !observer(epoch, delta)) break;
    if (tolerance > 0.0 && largest_step <= tolerance) break;
  }

  out.delta_shared = block_matvec(a, members, delta);
  out.decrease = std::max(0.0, sub.anchor_value() - sub.model_value(delta, out.delta_shared));
  return out;
}

}  // namespace

LocalSolution solve_local(const LocalSubproblem& sub, const SolverBudget& budget, const EpochObserver& observer) {
  if (budget.epochs == 0) throw Error(ErrorCode::invalid_budget, "local solver needs at least one epoch");
  if (budget.mode == BudgetMode::fixed_epochs) {
    return coordinate_descent(sub, budget.epochs, budget.seed, budget.tolerance, observer);
  }

  // target_eta: run a long reference solve, then stop the real solve at the
  // first power-of-two epoch whose certified eta meets the target.
  const auto reference = coordinate_descent(sub, budget.epochs * budget.reference_factor,
                                            detail::mix_seed(budget.seed, 0x7265ULL), 0.0, {});
  const double m0 = sub.anchor_value();
  const double mstar = sub.model_value(reference.delta, reference.delta_shared);
  const bool degenerate = m0 - mstar <= 1e-14;
  std::optional<double> eta;
  auto check = [&](std::size_t epoch, std::span<const double> delta) {
    if (observer && !observer(epoch, delta)) return false;
    if (degenerate) {
      eta = 0.0;
      return false;
    }
    if ((epoch & (epoch - 1)) != 0 && epoch != budget.epochs) return true;
    eta = std::max(0.0, (sub.model_value(delta) - mstar) / (m0 - mstar));
    return *eta > budget.target_eta;
  };
  auto out = coordinate_descent(sub, budget.epochs, budget.seed, 0.0, check);
  out.certified_eta = eta;
  return out;
}

double eta_certificate(const LocalSubproblem& sub, std::span<const double> delta, std::span<const double> reference) {
  const double m0 = sub.anchor_value();
  const double mstar = sub.model_value(reference);
  const double denom = m0 - mstar;
  if (denom <= 1e-14) {
    throw Error(ErrorCode::degenerate_subproblem, "M(0) - M(delta*) = " + std::to_string(denom));
  }
  return std::max(0.0, (sub.model_value(delta) - mstar) / denom);
}

}  // namespace adn
