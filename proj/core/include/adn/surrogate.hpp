#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "adn/objectives.hpp"
#include "adn/sparse.hpp"

namespace adn {

/// Everything a worker needs from outside its own block, frozen at round
/// start: v, grad f(v), the curvature diagonal D and f(v). All length d.
struct ModelSnapshot {
  std::vector<double> shared;
  std::vector<double> gradient;
  std::vector<double> curvature;
  double loss_value = 0.0;

  /// Block-diagonal Hessian model: D = diag(f''(v)).
  static ModelSnapshot capture(const SmoothLoss& loss, std::span<const double> v);
  /// Scaled-identity model D = (1/tau) I.
  static ModelSnapshot capture_smoothness(const SmoothLoss& loss, std::span<const double> v);
};

/// The local model of worker k,
///
///   M_k(delta) = f(v)/K + grad f(v)^T A_k delta + sigma/2 (A_k delta)^T D (A_k delta)
///                + damping/2 ||delta||^2 + sum_{i in I_k} g(alpha_i + delta_i).
///
/// Summed over k this is the block-separable surrogate of O(alpha + delta).
/// Holds references to the matrix, snapshot and regularizer; they must
/// outlive the subproblem.
class LocalSubproblem {
 public:
  LocalSubproblem(const SparseColMatrix& a, std::span<const std::size_t> members, std::size_t part,
                  std::size_t num_parts, const ModelSnapshot& snapshot, std::vector<double> alpha_block,
                  const Regularizer& reg, double sigma, double damping = 0.0);

  std::size_t part() const noexcept { return part_; }
  std::size_t num_parts() const noexcept { return num_parts_; }
  std::size_t size() const noexcept { return members_.size(); }
  std::span<const std::size_t> members() const noexcept { return members_; }
  std::span<const double> alpha() const noexcept { return alpha_; }
  double sigma() const noexcept { return sigma_; }
  double damping() const noexcept { return damping_; }
  const SparseColMatrix& matrix() const noexcept { return *a_; }
  const ModelSnapshot& snapshot() const noexcept { return *snapshot_; }
  const Regularizer& reg() const noexcept { return *reg_; }

  /// A_k delta
  std::vector<double> image(std::span<const double> delta) const;
  /// M_k(0) = f(v)/K + sum_{i in I_k} g(alpha_i)
  double anchor_value() const noexcept;
  /// Throws LengthMismatch unless delta is aligned with members().
  double model_value(std::span<const double> delta) const;
  /// Same, reusing a precomputed image = A_k delta.
  double model_value(std::span<const double> delta, std::span<const double> image) const;
  /// delta^T H_k delta = (A_k delta)^T D (A_k delta), without the sigma factor.
  double quadratic_term(std::span<const double> delta) const;
  double quadratic_term_from_image(std::span<const double> image) const noexcept;
  /// sum_{i in I_k} g(alpha_i + delta_i)
  double regularizer_sum(std::span<const double> delta) const;

 private:
  void check_block(std::span<const double> delta) const;

  const SparseColMatrix* a_;
  std::span<const std::size_t> members_;
  std::size_t part_;
  std::size_t num_parts_;
  const ModelSnapshot* snapshot_;
  std::vector<double> alpha_;
  const Regularizer* reg_;
  double sigma_;
  double damping_;
};

/// M_sigma(delta; alpha) = sum_k M_k(delta_[k]) for a full-length delta.
/// Throws InconsistentSnapshots if the subproblems disagree on sigma, the
/// snapshot or K.
double eval_global_model(std::span<const LocalSubproblem> subs, std::span<const double> delta);

}  // namespace adn
