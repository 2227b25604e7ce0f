#include "adn/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "adn/error.hpp"
#include "adn/random.hpp"

namespace adn {

SparseColMatrix SparseColMatrix::from_triplets(std::span<const Triplet> triplets, std::size_t rows,
                                               std::size_t cols) {
  std::vector<Triplet> sorted(triplets.begin(), triplets.end());
  for (const auto& t : sorted) {
    if (t.row >= rows || t.col >= cols) {
      throw Error(ErrorCode::index_out_of_range,
                  "entry (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                      ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
    }
  }
  std::stable_sort(sorted.begin(), sorted.end(), [](const Triplet& x, const Triplet& y) {
    return x.col != y.col ? x.col < y.col : x.row < y.row;
  });

  SparseColMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.col_ptr_.assign(cols + 1, 0);
  m.row_idx_.reserve(sorted.size());
  m.values_.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& t = sorted[i];
    if (i > 0 && sorted[i - 1].col == t.col && sorted[i - 1].row == t.row) {
      throw Error(ErrorCode::duplicate_entry, "duplicate entry at row " + std::to_string(t.row) +
                                                  ", column " + std::to_string(t.col));
    }
    if (t.value == 0.0) continue;
    m.row_idx_.push_back(t.row);
    m.values_.push_back(t.value);
    ++m.col_ptr_[t.col + 1];
  }
  std::partial_sum(m.col_ptr_.begin(), m.col_ptr_.end(), m.col_ptr_.begin());
  return m;
}

double SparseColMatrix::col_dot(std::size_t col, std::span<const double> x) const noexcept {
  double s = 0.0;
  for (std::size_t p = col_ptr_[col]; p < col_ptr_[col + 1]; ++p) s += values_[p] * x[row_idx_[p]];
  return s;
}

void SparseColMatrix::col_axpy(std::size_t col, double scale, std::span<double> y) const noexcept {
  for (std::size_t p = col_ptr_[col]; p < col_ptr_[col + 1]; ++p) y[row_idx_[p]] += scale * values_[p];
}

double SparseColMatrix::col_weighted_sq_norm(std::size_t col,
                                             std::span<const double> weights) const noexcept {
  double s = 0.0;
  for (std::size_t p = col_ptr_[col]; p < col_ptr_[col + 1]; ++p)
    s += weights[row_idx_[p]] * values_[p] * values_[p];
  return s;
}

double SparseColMatrix::col_sq_norm(std::size_t col) const noexcept {
  double s = 0.0;
  for (std::size_t p = col_ptr_[col]; p < col_ptr_[col + 1]; ++p) s += values_[p] * values_[p];
  return s;
}

std::vector<double> SparseColMatrix::multiply(std::span<const double> x) const {
  if (x.size() != cols_) {
    throw Error(ErrorCode::length_mismatch, "multiply: expected " + std::to_string(cols_) +
                                                " coefficients, got " + std::to_string(x.size()));
  }
  std::vector<double> y(rows_, 0.0);
  for (std::size_t i = 0; i < cols_; ++i) {
    if (x[i] != 0.0) col_axpy(i, x[i], y);
  }
  return y;
}

Partition::Partition(std::size_t n, std::vector<std::vector<std::size_t>> parts)
    : parts_(std::move(parts)), owner_(n, 0), local_(n, 0) {
  std::vector<bool> seen(n, false);
  std::size_t total = 0;
  for (std::size_t k = 0; k < parts_.size(); ++k) {
    auto& members = parts_[k];
    std::sort(members.begin(), members.end());
    for (std::size_t pos = 0; pos < members.size(); ++pos) {
      const std::size_t i = members[pos];
      if (i >= n) throw Error(ErrorCode::index_out_of_range, "partition member " + std::to_string(i));
      if (seen[i]) throw Error(ErrorCode::duplicate_entry, "coordinate in two parts: " + std::to_string(i));
      seen[i] = true;
      owner_[i] = k;
      local_[i] = pos;
    }
    total += members.size();
  }
  if (total != n) throw Error(ErrorCode::invalid_input, "partition does not cover all coordinates");
}

std::vector<double> Partition::extract(std::size_t part, std::span<const double> full) const {
  if (full.size() != owner_.size()) throw Error(ErrorCode::length_mismatch, "extract: full vector length");
  std::vector<double> block;
  block.reserve(parts_[part].size());
  for (std::size_t i : parts_[part]) block.push_back(full[i]);
  return block;
}

void Partition::scatter(std::size_t part, std::span<const double> block, std::span<double> full) const {
  if (block.size() != parts_[part].size() || full.size() != owner_.size()) {
    throw Error(ErrorCode::length_mismatch, "scatter: block or full vector length");
  }
  for (std::size_t pos = 0; pos < block.size(); ++pos) full[parts_[part][pos]] = block[pos];
}

std::vector<double> Partition::block_from_sparse(
    std::size_t part, std::span<const std::pair<std::size_t, double>> coefficients) const {
  std::vector<double> block(parts_[part].size(), 0.0);
  for (const auto& [i, value] : coefficients) {
    if (i >= owner_.size() || owner_[i] != part) {
      throw Error(ErrorCode::coordinate_outside_part,
                  "coordinate " + std::to_string(i) + " is not in part " + std::to_string(part));
    }
    block[local_[i]] += value;
  }
  return block;
}

Partition partition_columns(std::size_t n, std::size_t k, PartitionStrategy strategy, std::uint64_t seed) {
  if (k < 1 || k > n) {
    throw Error(ErrorCode::invalid_k,
                "K=" + std::to_string(k) + " must satisfy 1 <= K <= n=" + std::to_string(n));
  }
  std::vector<std::vector<std::size_t>> parts(k);
  if (strategy == PartitionStrategy::round_robin) {
    for (std::size_t i = 0; i < n; ++i) parts[i % k].push_back(i);
    return Partition(n, std::move(parts));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (strategy == PartitionStrategy::seeded_random) {
    detail::Rng rng(seed);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  }
  // First n % k parts get one extra coordinate.
  const std::size_t base = n / k;
  const std::size_t extra = n % k;
  std::size_t pos = 0;
  for (std::size_t p = 0; p < k; ++p) {
    const std::size_t size = base + (p < extra ? 1 : 0);
    parts[p].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    pos += size;
  }
  return Partition(n, std::move(parts));
}

std::vector<double> block_matvec(const SparseColMatrix& a, std::span<const std::size_t> members,
                                 std::span<const double> block) {
  if (members.size() != block.size()) {
    throw Error(ErrorCode::length_mismatch, "block_matvec: " + std::to_string(block.size()) +
                                                " coefficients for " + std::to_string(members.size()) +
                                                " columns");
  }
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t pos = 0; pos < members.size(); ++pos) {
    if (block[pos] != 0.0) a.col_axpy(members[pos], block[pos], y);
  }
  return y;
}

std::vector<double> block_matvec(const SparseColMatrix& a, const Partition& partition, std::size_t part,
                                 std::span<const std::pair<std::size_t, double>> coefficients) {
  const auto block = partition.block_from_sparse(part, coefficients);
  return block_matvec(a, partition.members(part), block);
}

ColumnNorms column_norms(const SparseColMatrix& a) {
  ColumnNorms out;
  out.norms.resize(a.cols());
  for (std::size_t i = 0; i < a.cols(); ++i) {
    out.norms[i] = std::sqrt(a.col_sq_norm(i));
    out.max_norm = std::max(out.max_norm, out.norms[i]);
  }
  return out;
}

namespace {

// Returns (lambda_max(A_k^T A_k), converged).
std::pair<double, bool> block_spectral_sq(const SparseColMatrix& a, std::span<const std::size_t> members,
                                          double tol, std::size_t max_iter) {
  const std::size_t nk = members.size();
  if (nk == 0) return {0.0, true};

  std::vector<double> x(nk);
  detail::Rng rng(0x5eed'b10c'4a11ULL);
  for (auto& xi : x) xi = 2.0 * rng.uniform() - 1.0;
  double nx = norm2(x);
  for (auto& xi : x) xi /= nx;

  std::vector<double> y(a.rows());
  std::vector<double> z(nk);
  double lambda = 0.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t p = 0; p < nk; ++p) a.col_axpy(members[p], x[p], y);
    for (std::size_t p = 0; p < nk; ++p) z[p] = a.col_dot(members[p], y);
    lambda = dot(y, y);
    if (lambda == 0.0) {
      // Start vector in the null space; the block may still be nonzero.
      bool any = false;
      for (std::size_t p = 0; p < nk && !any; ++p) any = a.col_sq_norm(members[p]) > 0.0;
      if (!any) return {0.0, true};
      for (std::size_t p = 0; p < nk; ++p) x[p] = (p == it % nk) ? 1.0 : 0.0;
      continue;
    }
    double res = 0.0;
    for (std::size_t p = 0; p < nk; ++p) res += (z[p] - lambda * x[p]) * (z[p] - lambda * x[p]);
    const double nz = norm2(z);
    for (std::size_t p = 0; p < nk; ++p) x[p] = z[p] / nz;
    if (std::sqrt(res) <= tol * lambda) return {lambda, true};
  }
  return {lambda, false};
}

}  // namespace

BlockNorms block_norms(const SparseColMatrix& a, const Partition& partition, double tol,
                       std::size_t max_iter) {
  BlockNorms out;
  for (std::size_t k = 0; k < partition.num_parts(); ++k) {
    const auto members = partition.members(k);
    auto [lambda, ok] = block_spectral_sq(a, members, tol, max_iter);
    double frob = 0.0;
    for (std::size_t i : members) frob += a.col_sq_norm(i);
    out.spectral_sq.push_back(lambda);
    out.frobenius_sq.push_back(frob);
    out.c_a = std::max(out.c_a, lambda);
    out.c_a_upper = std::max(out.c_a_upper, frob);
    out.converged = out.converged && ok;
  }
  return out;
}

void SharedVector::apply_delta(std::span<const double> delta) {
  if (delta.size() != values_.size()) {
    throw Error(ErrorCode::length_mismatch, "shared vector update of length " + std::to_string(delta.size()) +
                                                " for d=" + std::to_string(values_.size()));
  }
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += delta[j];
}

double dot(std::span<const double> x, std::span<const double> y) noexcept {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += x[j] * y[j];
  return s;
}

double norm2(std::span<const double> x) noexcept { return std::sqrt(dot(x, x)); }

}  // namespace adn
