#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "adn/sparse.hpp"

namespace adn {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

#ifdef NDEBUG
inline constexpr bool kDebugChecks = false;
#else
inline constexpr bool kDebugChecks = true;
#endif

/// Coordinate-separable smooth loss f(v) = sum_j phi_j(v_j), (1/tau)-smooth.
class SmoothLoss {
 public:
  enum class Kind { least_squares, logistic, quadratic_dual };

  /// 1/2 ||v - b||^2, tau = 1
  static SmoothLoss least_squares(std::vector<double> targets);
  /// sum_j log(1 + exp(-y_j v_j)), labels in {-1, +1}, tau = 4
  static SmoothLoss logistic(std::vector<double> labels);
  /// 1/(2 lambda) ||v - c||^2, tau = lambda. The dual of an L2-regularized GLM.
  static SmoothLoss quadratic_dual(double lambda, std::vector<double> offset);
  static SmoothLoss quadratic_dual(double lambda, std::size_t d) {
    return quadratic_dual(lambda, std::vector<double>(d, 0.0));
  }

  Kind kind() const noexcept { return kind_; }
  std::size_t dimension() const noexcept { return data_.size(); }
  std::span<const double> data() const noexcept { return data_; }
  double lambda() const noexcept { return lambda_; }
  /// f is (1/tau)-smooth.
  double tau() const noexcept;
  bool is_quadratic() const noexcept { return kind_ != Kind::logistic; }

  double value(std::span<const double> v) const;
  std::vector<double> gradient(std::span<const double> v) const;
  /// phi_j''(v_j); the diagonal D of the Hessian over v. Always >= 0.
  std::vector<double> hessian_diag(std::span<const double> v) const;

  /// f(v + dv) - f(v) - grad f(v)^T dv evaluated per coordinate without
  /// cancellation against f(v).
  double bregman(std::span<const double> v, std::span<const double> dv) const;

 private:
  SmoothLoss(Kind kind, std::vector<double> data, double lambda)
      : kind_(kind), data_(std::move(data)), lambda_(lambda) {}
  void check_length(std::size_t n, std::string_view op) const;

  Kind kind_ = Kind::least_squares;
  std::vector<double> data_;  // targets, labels or offset
  double lambda_ = 1.0;
};

/// Separable regularizer g_i, identical for every coordinate.
class Regularizer {
 public:
  enum class Kind { l2, l1, elastic_net, box_entropy_dual };

  /// (mu/2) a^2
  static Regularizer l2(double mu);
  /// lambda |a| restricted to |a| <= bound; +inf outside.
  static Regularizer l1(double lambda, double bound);
  /// Uses the default support bound 1e6 / lambda.
  static Regularizer l1(double lambda) { return l1(lambda, 1e6 / lambda); }
  /// lambda1 |a| + (lambda2/2) a^2, lambda2 > 0
  static Regularizer elastic_net(double lambda1, double lambda2);
  /// a log a + (1-a) log(1-a) on [0, 1]: the conjugate of the logistic loss.
  static Regularizer box_entropy_dual();

  Kind kind() const noexcept { return kind_; }
  double weight() const noexcept { return w1_; }
  double weight2() const noexcept { return w2_; }
  /// mu
  double strong_convexity() const noexcept;
  /// L with g(a) = +inf for |a| > L; +inf for unbounded kinds.
  double support_bound() const noexcept;

  double value(double a) const noexcept;
  double conjugate(double w) const noexcept;
  /// A point of the subdifferential of g* at w. The L1 tie |w| = lambda maps to 0.
  double conjugate_subgradient(double w) const;
  /// argmin_x (x - z)^2 / (2 step) + g(x)
  double prox(double z, double step) const noexcept;

 private:
  Regularizer(Kind kind, double w1, double w2) : kind_(kind), w1_(w1), w2_(w2) {}

  Kind kind_ = Kind::l2;
  double w1_ = 0.0;  // mu | lambda | lambda1
  double w2_ = 0.0;  // bound | lambda2
};

struct ProblemSpec {
  SmoothLoss loss;
  Regularizer reg;
};

struct ObjectiveValue {
  double f_part = 0.0;
  double g_part = 0.0;
  double total = 0.0;
};

/// Sum of g over a set of coordinates.
double regularizer_sum(const Regularizer& reg, std::span<const double> alpha) noexcept;

/// O(alpha) = f(v) + sum_i g(alpha_i) with v = A alpha supplied by the caller.
/// With verify_shared, v is checked against A alpha (InconsistentSharedVector).
ObjectiveValue evaluate_objective(const ProblemSpec& spec, const SparseColMatrix& a,
                                  std::span<const double> alpha, std::span<const double> v,
                                  bool verify_shared = kDebugChecks);

/// Contribution of the given coordinates to the duality gap
///   sum_i g*(-x_i^T w) + g(alpha_i) + alpha_i x_i^T w,  w = grad f(v).
/// Throws InfiniteConjugate.
double duality_gap_partial(const Regularizer& reg, const SparseColMatrix& a,
                           std::span<const std::size_t> coordinates, std::span<const double> alpha_block,
                           std::span<const double> w);

/// Full duality gap, an upper bound on O(alpha) - O(alpha*).
double duality_gap(const ProblemSpec& spec, const SparseColMatrix& a, std::span<const double> alpha,
                   std::span<const double> v);

// Overflow-safe scalar helpers shared by the losses and regularizers.
double softplus(double z) noexcept;  ///< log(1 + e^z)
double sigmoid(double z) noexcept;   ///< 1 / (1 + e^-z)

}  // namespace adn
