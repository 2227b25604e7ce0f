#include "adn/surrogate.hpp"

#include <string>

#include "adn/error.hpp"

namespace adn {

ModelSnapshot ModelSnapshot::capture(const SmoothLoss& loss, std::span<const double> v) {
  ModelSnapshot s;
  s.shared.assign(v.begin(), v.end());
  s.gradient = loss.gradient(v);
  s.curvature = loss.hessian_diag(v);
  s.loss_value = loss.value(v);
  return s;
}

ModelSnapshot ModelSnapshot::capture_smoothness(const SmoothLoss& loss, std::span<const double> v) {
  ModelSnapshot s;
  s.shared.assign(v.begin(), v.end());
  s.gradient = loss.gradient(v);
  s.curvature.assign(v.size(), 1.0 / loss.tau());
  s.loss_value = loss.value(v);
  return s;
}

LocalSubproblem::LocalSubproblem(const SparseColMatrix& a, std::span<const std::size_t> members,
                                 std::size_t part, std::size_t num_parts, const ModelSnapshot& snapshot,
                                 std::vector<double> alpha_block, const Regularizer& reg, double sigma,
                                 double damping)
    : a_(&a),
      members_(members),
      part_(part),
      num_parts_(num_parts),
      snapshot_(&snapshot),
      alpha_(std::move(alpha_block)),
      reg_(&reg),
      sigma_(sigma),
      damping_(damping) {
  if (alpha_.size() != members_.size()) throw Error(ErrorCode::length_mismatch, "alpha block vs part size");
  if (snapshot.shared.size() != a.rows() || snapshot.gradient.size() != a.rows() ||
      snapshot.curvature.size() != a.rows()) {
    throw Error(ErrorCode::length_mismatch, "snapshot vectors must have length d");
  }
  if (!(sigma > 0.0) || damping < 0.0 || num_parts == 0) {
    throw Error(ErrorCode::invalid_input, "subproblem requires sigma > 0, damping >= 0, K >= 1");
  }
}

void LocalSubproblem::check_block(std::span<const double> delta) const {
  if (delta.size() != members_.size()) {
    throw Error(ErrorCode::length_mismatch, "delta of length " + std::to_string(delta.size()) +
                                                " for part of size " + std::to_string(members_.size()));
  }
}

std::vector<double> LocalSubproblem::image(std::span<const double> delta) const {
  return block_matvec(*a_, members_, delta);
}

double LocalSubproblem::anchor_value() const noexcept {
  return snapshot_->loss_value / static_cast<double>(num_parts_) + adn::regularizer_sum(*reg_, alpha_);
}

double LocalSubproblem::model_value(std::span<const double> delta) const {
  check_block(delta);
  const auto img = image(delta);
  return model_value(delta, img);
}

double LocalSubproblem::model_value(std::span<const double> delta, std::span<const double> image) const {
  check_block(delta);
  const double linear = dot(snapshot_->gradient, image);
  const double quad = quadratic_term_from_image(image);
  double damp = 0.0;
  for (double x : delta) damp += x * x;
  return snapshot_->loss_value / static_cast<double>(num_parts_) + linear + 0.5 * sigma_ * quad +
         0.5 * damping_ * damp + regularizer_sum(delta);
}

double LocalSubproblem::quadratic_term(std::span<const double> delta) const {
  check_block(delta);
  const auto img = image(delta);
  return quadratic_term_from_image(img);
}

double LocalSubproblem::quadratic_term_from_image(std::span<const double> image) const noexcept {
  double s = 0.0;
  const auto& d = snapshot_->curvature;
  for (std::size_t j = 0; j < image.size(); ++j) s += d[j] * image[j] * image[j];
  return s;
}

double LocalSubproblem::regularizer_sum(std::span<const double> delta) const {
  check_block(delta);
  double s = 0.0;
  for (std::size_t p = 0; p < delta.size(); ++p) s += reg_->value(alpha_[p] + delta[p]);
  return s;
}

double eval_global_model(std::span<const LocalSubproblem> subs, std::span<const double> delta) {
  if (subs.empty()) throw Error(ErrorCode::invalid_input, "no subproblems");
  const auto& first = subs.front();
  double total = 0.0;
  for (const auto& sub : subs) {
    const bool same_snapshot = &sub.snapshot() == &first.snapshot() ||
                               (sub.snapshot().shared == first.snapshot().shared &&
                                sub.snapshot().curvature == first.snapshot().curvature &&
                                sub.snapshot().gradient == first.snapshot().gradient);
    if (sub.sigma() != first.sigma() || sub.damping() != first.damping() ||
        sub.num_parts() != first.num_parts() || !same_snapshot) {
      throw Error(ErrorCode::inconsistent_snapshots,
                  "subproblem " + std::to_string(sub.part()) + " disagrees on sigma, K or snapshot");
    }
    std::vector<double> block;
    block.reserve(sub.size());
    for (std::size_t i : sub.members()) {
      if (i >= delta.size()) throw Error(ErrorCode::length_mismatch, "delta shorter than n");
      block.push_back(delta[i]);
    }
    total += sub.model_value(block);
  }
  return total;
}

}  // namespace adn
