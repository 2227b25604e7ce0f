#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

#include "adn/objectives.hpp"
#include "adn/sparse.hpp"

namespace adn {

/// primal: columns are features (A is examples x features, alpha are weights).
/// dual:   columns are examples (A is features x examples, alpha are dual variables).
enum class Layout { primal, dual };

std::string_view to_string(Layout layout) noexcept;

struct Dataset {
  SparseColMatrix matrix;
  Layout layout = Layout::primal;
  std::vector<double> labels;   ///< one per example, in {-1, +1}
  std::vector<double> targets;  ///< raw label values, for regression
  /// Generator-only: alpha_true (primal) or w_true (dual).
  std::vector<double> planted;

  std::size_t num_examples() const noexcept { return labels.size(); }
};

/// LIBSVM text, `label idx:val ...` with 1-based indices. Labels <= 0 map to
/// -1, others to +1. With `normalize`, every example is scaled to unit norm.
/// Throws ParseError (with the 1-based line) and EmptyDataset.
Dataset parse_libsvm(std::istream& in, Layout layout, bool normalize = true);
Dataset parse_libsvm(const std::filesystem::path& path, Layout layout, bool normalize = true);

struct SyntheticSpec {
  std::size_t d = 100;  ///< rows of A
  std::size_t n = 100;  ///< columns of A
  double density = 0.1;
  /// Weight of a factor shared by all columns, in [0, 1). Raises block coupling.
  double correlation = 0.0;
  /// Fraction of nonzero entries in the planted vector.
  double sparsity = 0.1;
  double noise = 0.0;
  std::uint64_t seed = 0;
  Layout layout = Layout::primal;
};

/// Seeded Gaussian sparse columns normalized to unit norm. In the primal
/// layout targets are A alpha_true + noise and labels are drawn from the
/// logistic model at A alpha_true; in the dual layout column i is example i
/// and its label is drawn at x_i^T w_true. Throws InvalidSpec.
Dataset generate_synthetic(const SyntheticSpec& spec);

/// Writes the dataset back as LIBSVM text, one line per example. With
/// `regression` the raw targets are written instead of the +-1 labels.
void write_libsvm(std::ostream& out, const Dataset& data, bool regression = false);

/// Column i multiplied by labels[i].
SparseColMatrix signed_columns(const SparseColMatrix& a, std::span<const double> labels);

enum class LossKind { least_squares, logistic };
enum class RegKind { l2, l1, elastic_net };

std::string_view to_string(LossKind k) noexcept;
std::string_view to_string(RegKind k) noexcept;

struct ProblemParams {
  LossKind loss = LossKind::logistic;
  RegKind reg = RegKind::l2;
  double mu = 1e-3;     ///< l2 weight (and lambda2 of the elastic net)
  double lambda = 1e-3;  ///< l1 weight
  double bound = 0.0;    ///< l1 support bound; 0 picks the default
};

struct Problem {
  ProblemSpec spec;
  SparseColMatrix matrix;
};

/// Primal: any loss/regularizer pair. Dual: logistic + l2 becomes
///   min_a ||A a||^2 / (2 mu) + sum_i [a_i log a_i + (1 - a_i) log(1 - a_i)]
/// over columns y_i x_i. Other dual pairs throw ConfigError.
Problem build_problem(const Dataset& data, const ProblemParams& params);

}  // namespace adn
