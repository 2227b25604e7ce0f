#include "adn/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adn/error.hpp"

namespace adn {

double softplus(double z) noexcept { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

double soft_threshold(double z, double t) noexcept {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

double xlogx(double x) noexcept { return x > 0.0 ? x * std::log(x) : 0.0; }

// softplus(z + delta) - softplus(z) - sigmoid(z) delta
double softplus_bregman(double z, double delta) noexcept {
  if (std::abs(delta) < 1e-3) {
    const double p = sigmoid(z);
    const double q = sigmoid(-z);
    const double s2 = p * q;
    const double s3 = s2 * (q - p);
    const double s4 = s2 * (1.0 - 6.0 * s2);
    const double d2 = delta * delta;
    return d2 * (s2 / 2.0 + delta * (s3 / 6.0 + delta * s4 / 24.0));
  }
  return softplus(z + delta) - softplus(z) - sigmoid(z) * delta;
}

// argmin_x (x - z)^2 / (2 step) + x log x + (1 - x) log(1 - x). Solved for the
// logit t of x: t + (sigmoid(t) - z) / step = 0, root bracketed in
// [(z - 1) / step, z / step].
double entropy_prox(double z, double step) noexcept {
  double lo = (z - 1.0) / step;
  double hi = z / step;
  const double zc = std::clamp(z, 1e-12, 1.0 - 1e-12);
  double t = std::clamp(std::log(zc) - std::log1p(-zc), lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double p = sigmoid(t);
    const double phi = t + (p - z) / step;
    if (phi == 0.0) break;
    if (phi < 0.0) lo = t; else hi = t;
    const double dphi = 1.0 + p * sigmoid(-t) / step;
    double next = t - phi / dphi;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-15 * (1.0 + std::abs(t))) {
      t = next;
      break;
    }
    t = next;
  }
  return sigmoid(t);
}

}  // namespace

// ---------------------------------------------------------------------------
// SmoothLoss

SmoothLoss SmoothLoss::least_squares(std::vector<double> targets) {
  return SmoothLoss(Kind::least_squares, std::move(targets), 1.0);
}

SmoothLoss SmoothLoss::logistic(std::vector<double> labels) {
  for (double y : labels) {
    if (y != 1.0 && y != -1.0) throw Error(ErrorCode::invalid_input, "logistic labels must be +1 or -1");
  }
  return SmoothLoss(Kind::logistic, std::move(labels), 1.0);
}

SmoothLoss SmoothLoss::quadratic_dual(double lambda, std::vector<double> offset) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::invalid_input, "quadratic_dual requires lambda > 0");
  return SmoothLoss(Kind::quadratic_dual, std::move(offset), lambda);
}

double SmoothLoss::tau() const noexcept {
  switch (kind_) {
    case Kind::least_squares: return 1.0;
    case Kind::logistic: return 4.0;
    case Kind::quadratic_dual: return lambda_;
  }
  return 1.0;
}

void SmoothLoss::check_length(std::size_t n, std::string_view op) const {
  if (n != data_.size()) {
    throw Error(ErrorCode::length_mismatch, std::string(op) + ": vector of length " + std::to_string(n) +
                                                " for loss of dimension " + std::to_string(data_.size()));
  }
}

double SmoothLoss::value(std::span<const double> v) const {
  check_length(v.size(), "loss value");
  double s = 0.0;
  switch (kind_) {
    case Kind::least_squares:
      for (std::size_t j = 0; j < v.size(); ++j) s += (v[j] - data_[j]) * (v[j] - data_[j]);
      return 0.5 * s;
    case Kind::logistic:
      for (std::size_t j = 0; j < v.size(); ++j) s += softplus(-data_[j] * v[j]);
      return s;
    case Kind::quadratic_dual:
      for (std::size_t j = 0; j < v.size(); ++j) s += (v[j] - data_[j]) * (v[j] - data_[j]);
      return s / (2.0 * lambda_);
  }
  return s;
}

std::vector<double> SmoothLoss::gradient(std::span<const double> v) const {
  check_length(v.size(), "loss gradient");
  std::vector<double> g(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    switch (kind_) {
      case Kind::least_squares: g[j] = v[j] - data_[j]; break;
      case Kind::logistic: g[j] = -data_[j] * sigmoid(-data_[j] * v[j]); break;
      case Kind::quadratic_dual: g[j] = (v[j] - data_[j]) / lambda_; break;
    }
  }
  return g;
}

std::vector<double> SmoothLoss::hessian_diag(std::span<const double> v) const {
  check_length(v.size(), "loss hessian");
  std::vector<double> h(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    switch (kind_) {
      case Kind::least_squares: h[j] = 1.0; break;
      case Kind::logistic: {
        const double z = data_[j] * v[j];
        h[j] = sigmoid(z) * sigmoid(-z);
        break;
      }
      case Kind::quadratic_dual: h[j] = 1.0 / lambda_; break;
    }
  }
  return h;
}

double SmoothLoss::bregman(std::span<const double> v, std::span<const double> dv) const {
  check_length(v.size(), "loss bregman");
  check_length(dv.size(), "loss bregman");
  double s = 0.0;
  switch (kind_) {
    case Kind::least_squares:
      for (double x : dv) s += x * x;
      return 0.5 * s;
    case Kind::quadratic_dual:
      for (double x : dv) s += x * x;
      return s / (2.0 * lambda_);
    case Kind::logistic:
      for (std::size_t j = 0; j < v.size(); ++j) s += softplus_bregman(-data_[j] * v[j], -data_[j] * dv[j]);
      return s;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Regularizer

Regularizer Regularizer::l2(double mu) {
  if (!(mu > 0.0)) throw Error(ErrorCode::invalid_input, "l2 requires mu > 0");
  return Regularizer(Kind::l2, mu, 0.0);
}

Regularizer Regularizer::l1(double lambda, double bound) {
  if (!(lambda > 0.0) || !(bound > 0.0)) throw Error(ErrorCode::invalid_input, "l1 requires lambda > 0 and bound > 0");
  return Regularizer(Kind::l1, lambda, bound);
}

Regularizer Regularizer::elastic_net(double lambda1, double lambda2) {
  if (!(lambda1 >= 0.0) || !(lambda2 > 0.0)) {
    throw Error(ErrorCode::invalid_input, "elastic_net requires lambda1 >= 0 and lambda2 > 0");
  }
  return Regularizer(Kind::elastic_net, lambda1, lambda2);
}

Regularizer Regularizer::box_entropy_dual() { return Regularizer(Kind::box_entropy_dual, 0.0, 0.0); }

double Regularizer::strong_convexity() const noexcept {
  switch (kind_) {
    case Kind::l2: return w1_;
    case Kind::l1: return 0.0;
    case Kind::elastic_net: return w2_;
    case Kind::box_entropy_dual: return 4.0;  // 1 / (a (1 - a)) >= 4
  }
  return 0.0;
}

double Regularizer::support_bound() const noexcept {
  switch (kind_) {
    case Kind::l1: return w2_;
    case Kind::box_entropy_dual: return 1.0;
    default: return kInfinity;
  }
}

double Regularizer::value(double a) const noexcept {
  switch (kind_) {
    case Kind::l2: return 0.5 * w1_ * a * a;
    case Kind::l1: return std::abs(a) <= w2_ ? w1_ * std::abs(a) : kInfinity;
    case Kind::elastic_net: return w1_ * std::abs(a) + 0.5 * w2_ * a * a;
    case Kind::box_entropy_dual:
      if (a < 0.0 || a > 1.0) return kInfinity;
      return xlogx(a) + xlogx(1.0 - a);
  }
  return kInfinity;
}

double Regularizer::conjugate(double w) const noexcept {
  switch (kind_) {
    case Kind::l2: return w * w / (2.0 * w1_);
    case Kind::l1: {
      const double excess = std::abs(w) - w1_;
      return excess > 0.0 ? w2_ * excess : 0.0;
    }
    case Kind::elastic_net: {
      const double s = soft_threshold(w, w1_);
      return s * s / (2.0 * w2_);
    }
    case Kind::box_entropy_dual: return softplus(w);
  }
  return kInfinity;
}

double Regularizer::conjugate_subgradient(double w) const {
  switch (kind_) {
    case Kind::l2: return w / w1_;
    case Kind::l1:
      if (std::abs(w) <= w1_) return 0.0;
      return w > 0.0 ? w2_ : -w2_;
    case Kind::elastic_net: return soft_threshold(w, w1_) / w2_;
    case Kind::box_entropy_dual: return sigmoid(w);
  }
  throw Error(ErrorCode::unsupported_conjugate, "no conjugate subgradient for this regularizer");
}

double Regularizer::prox(double z, double step) const noexcept {
  switch (kind_) {
    case Kind::l2: return z / (1.0 + step * w1_);
    case Kind::l1: return std::clamp(soft_threshold(z, step * w1_), -w2_, w2_);
    case Kind::elastic_net: return soft_threshold(z, step * w1_) / (1.0 + step * w2_);
    case Kind::box_entropy_dual: return entropy_prox(z, step);
  }
  return z;
}

// ---------------------------------------------------------------------------

double regularizer_sum(const Regularizer& reg, std::span<const double> alpha) noexcept {
  double s = 0.0;
  for (double a : alpha) s += reg.value(a);
  return s;
}

ObjectiveValue evaluate_objective(const ProblemSpec& spec, const SparseColMatrix& a,
                                  std::span<const double> alpha, std::span<const double> v,
                                  bool verify_shared) {
  if (alpha.size() != a.cols()) throw Error(ErrorCode::length_mismatch, "alpha length differs from n");
  if (verify_shared) {
    const auto direct = a.multiply(alpha);
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t j = 0; j < direct.size(); ++j) {
      diff += (direct[j] - v[j]) * (direct[j] - v[j]);
      scale += v[j] * v[j];
    }
    if (v.size() != direct.size() || std::sqrt(diff) > 1e-8 * (1.0 + std::sqrt(scale))) {
      throw Error(ErrorCode::inconsistent_shared_vector, "shared vector differs from A * alpha");
    }
  }
  ObjectiveValue out;
  out.f_part = spec.loss.value(v);
  out.g_part = regularizer_sum(spec.reg, alpha);
  out.total = out.f_part + out.g_part;
  return out;
}

double duality_gap_partial(const Regularizer& reg, const SparseColMatrix& a,
                           std::span<const std::size_t> coordinates, std::span<const double> alpha_block,
                           std::span<const double> w) {
  if (coordinates.size() != alpha_block.size()) throw Error(ErrorCode::length_mismatch, "gap: block length");
  double gap = 0.0;
  for (std::size_t p = 0; p < coordinates.size(); ++p) {
    const double s = a.col_dot(coordinates[p], w);
    const double conj = reg.conjugate(-s);
    if (!std::isfinite(conj)) {
      throw Error(ErrorCode::infinite_conjugate,
                  "conjugate is +inf at coordinate " + std::to_string(coordinates[p]) +
                      "; use a regularizer with bounded support");
    }
    gap += conj + reg.value(alpha_block[p]) + alpha_block[p] * s;
  }
  return gap;
}

double duality_gap(const ProblemSpec& spec, const SparseColMatrix& a, std::span<const double> alpha,
                   std::span<const double> v) {
  if (alpha.size() != a.cols()) throw Error(ErrorCode::length_mismatch, "alpha length differs from n");
  const auto w = spec.loss.gradient(v);
  std::vector<std::size_t> all(a.cols());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return std::max(0.0, duality_gap_partial(spec.reg, a, all, alpha, w));
}

}  // namespace adn
