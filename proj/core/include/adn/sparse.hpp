#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace adn {

struct Triplet {
  std::size_t col;
  std::size_t row;
  double value;
};

/// Column-major sparse data matrix A (rows = d, cols = n). Immutable after
/// construction, so it may be shared read-only by any number of workers.
///
/// Invariants: row indices within a column are strictly increasing and lie in
/// [0, rows); explicit zeros are never stored.
class SparseColMatrix {
 public:
  SparseColMatrix() = default;

  /// Builds the matrix from (col, row, value) triplets. Triplets may arrive in
  /// any order; explicit zeros are dropped.
  /// Throws IndexOutOfRange or DuplicateEntry.
  static SparseColMatrix from_triplets(std::span<const Triplet> triplets, std::size_t rows,
                                       std::size_t cols);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  std::span<const std::size_t> col_rows(std::size_t col) const noexcept {
    return {row_idx_.data() + col_ptr_[col], col_ptr_[col + 1] - col_ptr_[col]};
  }
  std::span<const double> col_values(std::size_t col) const noexcept {
    return {values_.data() + col_ptr_[col], col_ptr_[col + 1] - col_ptr_[col]};
  }

  /// A_{:,col}^T x
  double col_dot(std::size_t col, std::span<const double> x) const noexcept;
  /// y += scale * A_{:,col}
  void col_axpy(std::size_t col, double scale, std::span<double> y) const noexcept;
  /// sum_j weights_j * A_{j,col}^2
  double col_weighted_sq_norm(std::size_t col, std::span<const double> weights) const noexcept;
  double col_sq_norm(std::size_t col) const noexcept;

  /// Dense y = A x (x has length cols()).
  std::vector<double> multiply(std::span<const double> x) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> col_ptr_{0};
  std::vector<std::size_t> row_idx_;
  std::vector<double> values_;
};

enum class PartitionStrategy { contiguous, round_robin, seeded_random };

/// Disjoint column index sets I_1..I_K covering [0, n). Members of each part
/// are stored in increasing order.
class Partition {
 public:
  Partition() = default;
  Partition(std::size_t n, std::vector<std::vector<std::size_t>> parts);

  std::size_t num_parts() const noexcept { return parts_.size(); }
  std::size_t num_coordinates() const noexcept { return owner_.size(); }
  std::span<const std::size_t> members(std::size_t part) const noexcept { return parts_[part]; }
  std::size_t owner(std::size_t coordinate) const noexcept { return owner_[coordinate]; }
  /// Position of `coordinate` inside members(owner(coordinate)).
  std::size_t local_index(std::size_t coordinate) const noexcept { return local_[coordinate]; }

  /// Copies the coordinates of `full` (length n) that belong to `part`.
  std::vector<double> extract(std::size_t part, std::span<const double> full) const;
  /// full[members(part)] = block
  void scatter(std::size_t part, std::span<const double> block, std::span<double> full) const;

  /// Converts sparse (coordinate, value) pairs into a dense block aligned with
  /// members(part). Throws CoordinateOutsidePart.
  std::vector<double> block_from_sparse(
      std::size_t part, std::span<const std::pair<std::size_t, double>> coefficients) const;

 private:
  std::vector<std::vector<std::size_t>> parts_;
  std::vector<std::size_t> owner_;
  std::vector<std::size_t> local_;
};

/// Splits n columns into K parts. Throws InvalidK when K < 1 or K > n.
Partition partition_columns(std::size_t n, std::size_t k, PartitionStrategy strategy,
                            std::uint64_t seed = 0);

/// A_{[k]} u_{[k]}: `block` is aligned with `members`. Throws LengthMismatch.
std::vector<double> block_matvec(const SparseColMatrix& a, std::span<const std::size_t> members,
                                 std::span<const double> block);

/// Same as above with sparse coefficients; throws CoordinateOutsidePart.
std::vector<double> block_matvec(const SparseColMatrix& a, const Partition& partition,
                                 std::size_t part,
                                 std::span<const std::pair<std::size_t, double>> coefficients);

struct ColumnNorms {
  std::vector<double> norms;  ///< ||A_{:,i}||_2
  double max_norm = 0.0;      ///< R
};

ColumnNorms column_norms(const SparseColMatrix& a);

struct BlockNorms {
  std::vector<double> spectral_sq;   ///< ||A_{[k]}||_2^2 via power iteration
  std::vector<double> frobenius_sq;  ///< ||A_{[k]}||_F^2, an upper bound of the above
  double c_a = 0.0;                  ///< max_k spectral_sq
  double c_a_upper = 0.0;            ///< max_k frobenius_sq
  bool converged = true;             ///< false if any block hit the iteration cap
};

/// Largest eigenvalue of A_{[k]}^T A_{[k]} for every part. Iteration stops when
/// the eigen-residual ||Bx - lambda x|| drops below tol * lambda.
BlockNorms block_norms(const SparseColMatrix& a, const Partition& partition, double tol = 1e-6,
                       std::size_t max_iter = 1000);

/// The shared vector v = A alpha, maintained incrementally by the master.
class SharedVector {
 public:
  SharedVector() = default;
  explicit SharedVector(std::size_t d) : values_(d, 0.0) {}
  explicit SharedVector(std::vector<double> values) : values_(std::move(values)) {}

  static SharedVector recompute(const SparseColMatrix& a, std::span<const double> alpha) {
    return SharedVector(a.multiply(alpha));
  }

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }

  /// v += delta. Throws LengthMismatch.
  void apply_delta(std::span<const double> delta);

 private:
  std::vector<double> values_;
};

double dot(std::span<const double> x, std::span<const double> y) noexcept;
double norm2(std::span<const double> x) noexcept;

}  // namespace adn
