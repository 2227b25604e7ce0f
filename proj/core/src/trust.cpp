#include "adn/trust.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adn/error.hpp"

namespace adn {

std::string_view to_string(SigmaSchedule s) noexcept {
  switch (s) {
    case SigmaSchedule::threshold: return "threshold";
    case SigmaSchedule::parameter_free: return "parameter_free";
    case SigmaSchedule::fixed: return "fixed";
  }
  return "unknown";
}

std::string_view to_string(DecisionReason r) noexcept {
  switch (r) {
    case DecisionReason::good_fit: return "good_fit";
    case DecisionReason::too_conservative: return "too_conservative";
    case DecisionReason::too_aggressive: return "too_aggressive";
    case DecisionReason::degenerate_denominator: return "degenerate_denominator";
  }
  return "unknown";
}

void TrustConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::config_error, msg); };
  if (!(gamma > 1.0)) fail("gamma must be > 1");
  if (!(zeta > 1.0)) fail("zeta must be > 1");
  if (!(xi < 1.0 / zeta)) fail("xi must be < 1/zeta");
  if (allow_zero_xi ? !(xi >= 0.0) : !(xi > 0.0)) fail(allow_zero_xi ? "xi must be >= 0" : "xi must be > 0");
  if (!(sigma_min > 0.0) || !std::isfinite(sigma_max)) fail("sigma bounds must be positive and finite");
  if (!(sigma_min <= sigma0 && sigma0 <= sigma_max)) fail("sigma0 must lie in [sigma_min, sigma_max]");
}

namespace {

double clamp_sigma(double sigma, const TrustConfig& cfg) noexcept {
  return std::clamp(sigma, cfg.sigma_min, cfg.sigma_max);
}

}  // namespace

std::optional<double> compute_rho(double obj_old, double obj_new, double model_new) noexcept {
  return rho_from_decreases(obj_old - obj_new, obj_old - model_new, std::abs(obj_old));
}

std::optional<double> rho_from_decreases(double actual_decrease, double model_decrease, double scale) noexcept {
  if (!(model_decrease > 1e-14 * (1.0 + scale))) return std::nullopt;
  return actual_decrease / model_decrease;
}

DecisionReason classify_rho(std::optional<double> rho, const TrustConfig& cfg) noexcept {
  if (!rho) return DecisionReason::degenerate_denominator;
  if (*rho > cfg.zeta) return DecisionReason::too_conservative;
  if (*rho >= 1.0 / cfg.zeta) return DecisionReason::good_fit;
  return DecisionReason::too_aggressive;
}

double update_sigma_threshold(double sigma, std::optional<double> rho, const TrustConfig& cfg) noexcept {
  switch (classify_rho(rho, cfg)) {
    case DecisionReason::too_conservative: return clamp_sigma(sigma / cfg.gamma, cfg);
    case DecisionReason::good_fit: return clamp_sigma(sigma, cfg);
    default: return clamp_sigma(cfg.gamma * sigma, cfg);
  }
}

std::optional<double> update_sigma_parameter_free(double sigma, double f_new, double f_old, double lin,
                                                  double quad_model, const TrustConfig& cfg) noexcept {
  return update_sigma_curvature_ratio(sigma, f_new - f_old - lin, quad_model - f_old - lin, cfg);
}

std::optional<double> update_sigma_curvature_ratio(double sigma, double actual, double model,
                                                   const TrustConfig& cfg) noexcept {
  if (!(model > 1e-14)) return std::nullopt;
  return clamp_sigma(sigma * actual / model, cfg);
}

RoundDecision decide_round(const TrustConfig& cfg, double sigma, std::optional<double> rho,
                           double curvature_actual, double curvature_model) noexcept {
  RoundDecision d;
  d.rho = rho;
  d.reason = classify_rho(rho, cfg);
  d.accepted = rho.has_value() && *rho >= cfg.xi;
  switch (cfg.schedule) {
    case SigmaSchedule::fixed:
      d.sigma_next = sigma;
      break;
    case SigmaSchedule::threshold:
      d.sigma_next = update_sigma_threshold(sigma, rho, cfg);
      break;
    case SigmaSchedule::parameter_free:
      if (!rho) {
        d.sigma_next = clamp_sigma(cfg.gamma * sigma, cfg);
      } else {
        d.sigma_next = update_sigma_curvature_ratio(sigma, curvature_actual, curvature_model, cfg).value_or(sigma);
      }
      break;
  }
  return d;
}

// ---------------------------------------------------------------------------

PredictionInputs gather_prediction_inputs(const ProblemSpec& spec, const SparseColMatrix& a,
                                          const Partition& partition, const TrustConfig& cfg, double eta,
                                          double sigma_sup, double initial_suboptimality) {
  PredictionInputs in;
  in.tau = spec.loss.tau();
  in.mu = spec.reg.strong_convexity();
  in.support_bound = spec.reg.support_bound();
  in.column_norm_bound = column_norms(a).max_norm;
  in.c_a = block_norms(a, partition).c_a;
  in.xi = cfg.xi;
  in.eta = eta;
  in.gamma = cfg.gamma;
  in.sigma0 = cfg.sigma0;
  in.sigma_sup = sigma_sup;
  in.initial_suboptimality = initial_suboptimality;
  return in;
}

ConvergencePrediction::ConvergencePrediction(const PredictionInputs& in) : in_(in) {
  if (!(in.tau > 0.0) || in.mu < 0.0 || !(in.eta >= 0.0 && in.eta < 1.0) || !(in.gamma > 1.0) ||
      !(in.sigma0 > 0.0) || !(in.sigma_sup > 0.0) || in.c_a < 0.0 || in.initial_suboptimality < 0.0) {
    throw Error(ErrorCode::invalid_input, "prediction inputs out of range");
  }
  const double contraction = in.xi * (1.0 - in.eta);
  const double L = in.support_bound;
  const double R = in.column_norm_bound;
  if (std::isfinite(L) && contraction > 0.0) {
    const double lr = 4.0 * L * L * R * R;
    c1_ = 2.0 * (lr + in.tau * in.initial_suboptimality) / (in.tau * contraction);
    c1_successful_ = 2.0 * (lr * in.sigma_sup / in.tau + in.initial_suboptimality) / contraction;
  }
  if (in.mu > 0.0) {
    const double mt = in.mu * in.tau;
    c2_ = 1.0 - contraction * mt / (in.c_a * in.sigma_sup + mt);
  }
}

double ConvergencePrediction::c1() const {
  if (!c1_) throw Error(ErrorCode::missing_constant, "C1 needs a bounded-support regularizer and xi > 0");
  return *c1_;
}

double ConvergencePrediction::c1_successful() const {
  if (!c1_successful_) throw Error(ErrorCode::missing_constant, "C1 needs a bounded-support regularizer and xi > 0");
  return *c1_successful_;
}

double ConvergencePrediction::c2() const {
  if (!c2_) throw Error(ErrorCode::missing_constant, "C2 needs a strongly convex regularizer");
  return *c2_;
}

double ConvergencePrediction::successful_iterations_strongly_convex(double eps) const {
  const double c = c2();
  if (!(eps > 0.0)) throw Error(ErrorCode::invalid_input, "eps must be positive");
  if (in_.initial_suboptimality <= eps) return 0.0;
  if (c >= 1.0) return kInfinity;
  return std::log(in_.initial_suboptimality / eps) / std::log(1.0 / c);
}

double ConvergencePrediction::successful_iterations_bounded_support(double eps) const {
  if (!(eps > 0.0)) throw Error(ErrorCode::invalid_input, "eps must be positive");
  return c1_successful() / eps;
}

double ConvergencePrediction::unsuccessful_iterations(std::size_t successful) const noexcept {
  const double climb = std::max(0.0, std::log(in_.sigma_sup / in_.sigma0) / std::log(in_.gamma));
  return climb + static_cast<double>(successful);
}

double ConvergencePrediction::total_iterations_strongly_convex(double eps) const {
  const double s = std::ceil(successful_iterations_strongly_convex(eps));
  if (!std::isfinite(s)) return kInfinity;
  return s + unsuccessful_iterations(static_cast<std::size_t>(s));
}

double ConvergencePrediction::total_iterations_bounded_support(double eps) const {
  const double s = std::ceil(successful_iterations_bounded_support(eps));
  if (!std::isfinite(s)) return kInfinity;
  return s + unsuccessful_iterations(static_cast<std::size_t>(s));
}

ConvergencePrediction predict_constants(const PredictionInputs& inputs) { return ConvergencePrediction(inputs); }

// ---------------------------------------------------------------------------

namespace {

// (e^x - x - 1) / x^2. Direct evaluation loses about log10(1/x) digits to
// cancellation, so below x = 1 sum the series sum_k x^k / (k+2)! instead.
double expm1_minus_x_over_x2(double x) {
  if (x >= 1.0) return (std::expm1(x) - x) / (x * x);
  double term = 0.5;
  double sum = 0.5;
  for (int k = 1; k < 40; ++k) {
    term *= x / static_cast<double>(k + 2);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

}  // namespace

double sigma_sup_quasi_self_concordant(double mf, double step_norm, std::size_t num_parts, double gamma) {
  if (!(mf > 0.0) || !(step_norm > 0.0) || num_parts == 0 || !(gamma > 0.0)) {
    throw Error(ErrorCode::invalid_input, "sigma_sup bound needs positive M_f, step norm, K and gamma");
  }
  const double x = mf * step_norm;
  // (e^x - x - 1) / (M_f^2 ||delta||) = ||delta|| * (e^x - x - 1) / x^2
  return 2.0 * static_cast<double>(num_parts) * gamma * step_norm * expm1_minus_x_over_x2(x);
}

double sigma_sup_lipschitz_hessian(double lipschitz, double agreement, double h_norm, double gamma) {
  if (!(lipschitz > 0.0) || !(agreement > 0.0) || !(h_norm > 0.0) || !(gamma > 0.0)) {
    throw Error(ErrorCode::invalid_input, "sigma_sup bound needs positive Lipschitz, C, ||H|| and gamma");
  }
  return gamma / (2.0 * h_norm) * (lipschitz + agreement + 1.0);
}

}  // namespace adn
