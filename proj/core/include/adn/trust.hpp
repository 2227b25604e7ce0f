#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string_view>

#include "adn/objectives.hpp"
#include "adn/sparse.hpp"

namespace adn {

enum class SigmaSchedule {
  threshold,       ///< sigma/gamma, sigma or gamma*sigma depending on rho vs zeta
  parameter_free,  ///< sigma scaled by the measured curvature misfit
  fixed,           ///< sigma never changes
};

std::string_view to_string(SigmaSchedule s) noexcept;

struct TrustConfig {
  double sigma0 = 1.0;
  double gamma = 1.2;
  double zeta = 1.2;
  double xi = 1e-6;
  SigmaSchedule schedule = SigmaSchedule::parameter_free;
  double sigma_min = 1e-8;
  double sigma_max = 1e8;
  /// Permits xi = 0 (accept any non-increasing step).
  bool allow_zero_xi = false;

  /// Throws ConfigError unless gamma > 1, zeta > 1, 0 < xi < 1/zeta (xi = 0
  /// only with allow_zero_xi) and sigma_min <= sigma0 <= sigma_max.
  void validate() const;

  static TrustConfig fixed_sigma(double sigma) {
    TrustConfig c;
    c.schedule = SigmaSchedule::fixed;
    c.sigma0 = sigma;
    c.sigma_min = std::min(c.sigma_min, sigma);
    c.sigma_max = std::max(c.sigma_max, sigma);
    return c;
  }
};

enum class DecisionReason { good_fit, too_conservative, too_aggressive, degenerate_denominator };

std::string_view to_string(DecisionReason r) noexcept;

struct RoundDecision {
  std::optional<double> rho;  ///< empty when the model decrease is degenerate
  bool accepted = false;
  double sigma_next = 1.0;
  DecisionReason reason = DecisionReason::good_fit;
};

/// rho = (obj_old - obj_new) / (obj_old - model_new). Empty when the
/// denominator is <= 1e-14 (1 + |obj_old|).
std::optional<double> compute_rho(double obj_old, double obj_new, double model_new) noexcept;

/// Same ratio from the two decreases directly; `scale` is |O(alpha)|.
std::optional<double> rho_from_decreases(double actual_decrease, double model_decrease, double scale) noexcept;

/// Which branch of the threshold rule a rho falls in.
DecisionReason classify_rho(std::optional<double> rho, const TrustConfig& cfg) noexcept;

/// sigma/gamma if rho > zeta, sigma if 1/zeta <= rho <= zeta, gamma*sigma
/// otherwise (including a degenerate rho); clamped to [sigma_min, sigma_max].
double update_sigma_threshold(double sigma, std::optional<double> rho, const TrustConfig& cfg) noexcept;

/// sigma * (f_new - f_old - lin) / (quad_model - f_old - lin), clamped.
/// Empty when the denominator is <= 1e-14 (keep sigma).
std::optional<double> update_sigma_parameter_free(double sigma, double f_new, double f_old, double lin,
                                                  double quad_model, const TrustConfig& cfg) noexcept;

/// The same update with the two curvature terms already formed:
///   actual = f(v + dv) - f(v) - grad^T dv,   model = sigma/2 sum_k dv_k^T D dv_k.
std::optional<double> update_sigma_curvature_ratio(double sigma, double actual, double model,
                                                   const TrustConfig& cfg) noexcept;

/// Acceptance (rho >= xi and not degenerate) plus the configured sigma update.
/// `curvature_actual` / `curvature_model` feed the parameter-free schedule.
RoundDecision decide_round(const TrustConfig& cfg, double sigma, std::optional<double> rho,
                           double curvature_actual, double curvature_model) noexcept;

// ---------------------------------------------------------------------------
// Convergence diagnostics

struct PredictionInputs {
  double tau = 1.0;            ///< f is (1/tau)-smooth
  double mu = 0.0;             ///< g is mu-strongly convex
  double support_bound = kInfinity;  ///< L
  double column_norm_bound = 0.0;    ///< R
  double c_a = 0.0;            ///< max_k ||A_[k]||^2
  double xi = 1e-6;
  double eta = 0.0;
  double gamma = 1.2;
  double sigma0 = 1.0;
  double sigma_sup = 1.0;
  double initial_suboptimality = 0.0;  ///< eps_0
};

/// Fills the data-dependent constants (R, c_A via power iteration, tau, mu, L).
PredictionInputs gather_prediction_inputs(const ProblemSpec& spec, const SparseColMatrix& a,
                                          const Partition& partition, const TrustConfig& cfg, double eta,
                                          double sigma_sup, double initial_suboptimality);

class ConvergencePrediction {
 public:
  explicit ConvergencePrediction(const PredictionInputs& in);

  const PredictionInputs& inputs() const noexcept { return in_; }

  bool has_c1() const noexcept { return c1_.has_value(); }
  bool has_c2() const noexcept { return c2_.has_value(); }
  /// 2 (4 L^2 R^2 + tau eps0) / (tau xi (1 - eta)). Throws MissingConstant
  /// when L is unbounded.
  double c1() const;
  /// 2 (4 L^2 R^2 sigma_sup / tau + eps0) / (xi (1 - eta)): the bound on
  /// eps * |S_T| for bounded-support g. Throws MissingConstant.
  double c1_successful() const;
  /// 1 - xi (1 - eta) mu tau / (c_A sigma_sup + mu tau). Throws MissingConstant
  /// when mu = 0.
  double c2() const;

  /// Successful iterations to reach eps (strongly convex g): log(eps0/eps)/log(1/C2).
  double successful_iterations_strongly_convex(double eps) const;
  /// Successful iterations to reach eps (bounded support g): C1_successful / eps.
  double successful_iterations_bounded_support(double eps) const;
  /// |U_T| <= log(sigma_sup / sigma0) / log(gamma) + |S_T|
  double unsuccessful_iterations(std::size_t successful) const noexcept;
  /// Total iteration bound, strongly convex case.
  double total_iterations_strongly_convex(double eps) const;
  /// Total iteration bound, bounded support case.
  double total_iterations_bounded_support(double eps) const;

 private:
  PredictionInputs in_;
  std::optional<double> c1_;
  std::optional<double> c1_successful_;
  std::optional<double> c2_;
};

ConvergencePrediction predict_constants(const PredictionInputs& inputs);

/// Upper bound on sigma_t for quasi-self-concordant f with constant M_f:
///   2 K gamma (e^x - x - 1) / (M_f^2 ||delta||),  x = M_f ||delta||.
/// Throws InvalidInput on non-positive arguments.
double sigma_sup_quasi_self_concordant(double mf, double step_norm, std::size_t num_parts, double gamma);

/// Upper bound on sigma_t when the Hessian of f is Lipschitz and the block
/// model agrees with it along the step: gamma (Lip + C + 1) / (2 ||H||).
double sigma_sup_lipschitz_hessian(double lipschitz, double agreement, double h_norm, double gamma);

}  // namespace adn
