#include "adn/data.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "adn/error.hpp"
#include "adn/random.hpp"

namespace adn {

std::string_view to_string(Layout layout) noexcept { return layout == Layout::primal ? "primal" : "dual"; }

std::string_view to_string(LossKind k) noexcept {
  return k == LossKind::least_squares ? "least_squares" : "logistic";
}

std::string_view to_string(RegKind k) noexcept {
  switch (k) {
    case RegKind::l2: return "l2";
    case RegKind::l1: return "l1";
    case RegKind::elastic_net: return "elastic_net";
  }
  return "unknown";
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

template <class T>
bool parse_number(std::string_view s, T& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

Dataset parse_libsvm(std::istream& in, Layout layout, bool normalize) {
  struct Entry {
    std::size_t example;
    std::size_t feature;
    double value;
  };
  std::vector<Entry> entries;
  std::vector<double> raw_labels;
  std::size_t num_features = 0;
  std::string line;
  std::size_t lineno = 0;

  while (std::getline(in, line)) {
    ++lineno;
    std::string_view rest(line);
    if (const auto hash = rest.find('#'); hash != std::string_view::npos) rest = rest.substr(0, hash);
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < rest.size()) {
      while (i < rest.size() && is_space(rest[i])) ++i;
      std::size_t j = i;
      while (j < rest.size() && !is_space(rest[j])) ++j;
      if (j > i) tokens.push_back(rest.substr(i, j - i));
      i = j;
    }
    if (tokens.empty()) continue;

    double label = 0.0;
    std::string_view label_tok = tokens[0];
    if (!label_tok.empty() && label_tok[0] == '+') label_tok.remove_prefix(1);
    if (!parse_number(label_tok, label) || !std::isfinite(label)) {
      throw ParseError(lineno, "bad label '" + std::string(tokens[0]) + "'");
    }
    const std::size_t example = raw_labels.size();
    raw_labels.push_back(label);
    std::size_t previous = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const auto colon = tokens[t].find(':');
      if (colon == std::string_view::npos) throw ParseError(lineno, "expected idx:val, got '" + std::string(tokens[t]) + "'");
      std::size_t idx = 0;
      double val = 0.0;
      if (!parse_number(tokens[t].substr(0, colon), idx) || idx == 0) {
        throw ParseError(lineno, "bad index in '" + std::string(tokens[t]) + "'");
      }
      if (!parse_number(tokens[t].substr(colon + 1), val) || !std::isfinite(val)) {
        throw ParseError(lineno, "bad value in '" + std::string(tokens[t]) + "'");
      }
      if (idx <= previous) throw ParseError(lineno, "indices must be strictly increasing");
      previous = idx;
      num_features = std::max(num_features, idx);
      entries.push_back({example, idx - 1, val});
    }
  }
  if (raw_labels.empty()) throw Error(ErrorCode::empty_dataset, "no examples");
  if (num_features == 0) throw Error(ErrorCode::empty_dataset, "no features");

  const std::size_t m = raw_labels.size();
  if (normalize) {
    std::vector<double> sq(m, 0.0);
    for (const auto& e : entries) sq[e.example] += e.value * e.value;
    for (auto& e : entries) {
      if (sq[e.example] > 0.0) e.value /= std::sqrt(sq[e.example]);
    }
  }

  std::vector<Triplet> triplets;
  triplets.reserve(entries.size());
  for (const auto& e : entries) {
    if (layout == Layout::primal) {
      triplets.push_back({e.feature, e.example, e.value});
    } else {
      triplets.push_back({e.example, e.feature, e.value});
    }
  }

  Dataset out;
  out.layout = layout;
  out.matrix = layout == Layout::primal ? SparseColMatrix::from_triplets(triplets, m, num_features)
                                        : SparseColMatrix::from_triplets(triplets, num_features, m);
  out.targets = raw_labels;
  out.labels.reserve(m);
  for (double y : raw_labels) out.labels.push_back(y > 0.0 ? 1.0 : -1.0);
  return out;
}

Dataset parse_libsvm(const std::filesystem::path& path, Layout layout, bool normalize) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::invalid_input, "cannot open " + path.string());
  return parse_libsvm(in, layout, normalize);
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  if (!(spec.density > 0.0 && spec.density <= 1.0)) throw Error(ErrorCode::invalid_spec, "density must be in (0, 1]");
  if (spec.d == 0 || spec.n == 0) throw Error(ErrorCode::invalid_spec, "d and n must be positive");
  if (!(spec.correlation >= 0.0 && spec.correlation < 1.0)) {
    throw Error(ErrorCode::invalid_spec, "correlation must be in [0, 1)");
  }
  if (!(spec.sparsity > 0.0 && spec.sparsity <= 1.0)) throw Error(ErrorCode::invalid_spec, "sparsity must be in (0, 1]");
  if (!(spec.noise >= 0.0)) throw Error(ErrorCode::invalid_spec, "noise must be non-negative");

  detail::Rng rng(detail::mix_seed(spec.seed, 0x53594e));
  std::vector<double> common(spec.d);
  for (double& x : common) x = rng.normal();
  const double own = std::sqrt(1.0 - spec.correlation);
  const double shared = std::sqrt(spec.correlation);

  std::vector<Triplet> triplets;
  std::vector<double> column(spec.d);
  for (std::size_t i = 0; i < spec.n; ++i) {
    std::fill(column.begin(), column.end(), 0.0);
    bool any = false;
    for (std::size_t j = 0; j < spec.d; ++j) {
      if (spec.density >= 1.0 || rng.uniform() < spec.density) {
        column[j] = own * rng.normal();
        any = any || column[j] != 0.0;
      }
    }
    if (!any) column[rng.below(spec.d)] = own * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    if (shared > 0.0) {
      for (std::size_t j = 0; j < spec.d; ++j) column[j] += shared * common[j];
    }
    double sq = 0.0;
    for (double x : column) sq += x * x;
    const double scale = 1.0 / std::sqrt(sq);
    for (std::size_t j = 0; j < spec.d; ++j) {
      if (column[j] != 0.0) triplets.push_back({i, j, column[j] * scale});
    }
  }

  Dataset out;
  out.layout = spec.layout;
  out.matrix = SparseColMatrix::from_triplets(triplets, spec.d, spec.n);

  // Planted model: alpha_true over columns (primal) or w_true over rows (dual).
  const std::size_t planted_len = spec.layout == Layout::primal ? spec.n : spec.d;
  out.planted.assign(planted_len, 0.0);
  for (double& x : out.planted) {
    if (rng.uniform() < spec.sparsity) x = rng.normal();
  }

  std::vector<double> scores;
  if (spec.layout == Layout::primal) {
    scores = out.matrix.multiply(out.planted);
  } else {
    scores.resize(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) scores[i] = out.matrix.col_dot(i, out.planted);
  }
  out.targets.resize(scores.size());
  out.labels.resize(scores.size());
  for (std::size_t j = 0; j < scores.size(); ++j) {
    out.targets[j] = scores[j] + spec.noise * rng.normal();
    out.labels[j] = rng.uniform() < sigmoid(scores[j]) ? 1.0 : -1.0;
  }
  return out;
}

void write_libsvm(std::ostream& out, const Dataset& data, bool regression) {
  const auto& a = data.matrix;
  // Example-major entries: columns of A in the dual layout, rows in the primal one.
  std::vector<std::vector<std::pair<std::size_t, double>>> examples(data.num_examples());
  for (std::size_t i = 0; i < a.cols(); ++i) {
    const auto rows = a.col_rows(i);
    const auto vals = a.col_values(i);
    for (std::size_t q = 0; q < rows.size(); ++q) {
      if (data.layout == Layout::primal) {
        examples.at(rows[q]).emplace_back(i, vals[q]);
      } else {
        examples.at(i).emplace_back(rows[q], vals[q]);
      }
    }
  }
  char buf[64];
  for (std::size_t e = 0; e < examples.size(); ++e) {
    std::snprintf(buf, sizeof buf, "%.17g", regression ? data.targets[e] : data.labels[e]);
    out << buf;
    for (const auto& [idx, val] : examples[e]) {
      std::snprintf(buf, sizeof buf, " %zu:%.17g", idx + 1, val);
      out << buf;
    }
    out << '\n';
  }
}

SparseColMatrix signed_columns(const SparseColMatrix& a, std::span<const double> labels) {
  if (labels.size() != a.cols()) throw Error(ErrorCode::length_mismatch, "one label per column expected");
  std::vector<Triplet> triplets;
  triplets.reserve(a.nnz());
  for (std::size_t i = 0; i < a.cols(); ++i) {
    const auto rows = a.col_rows(i);
    const auto vals = a.col_values(i);
    for (std::size_t q = 0; q < rows.size(); ++q) triplets.push_back({i, rows[q], labels[i] * vals[q]});
  }
  return SparseColMatrix::from_triplets(triplets, a.rows(), a.cols());
}

Problem build_problem(const Dataset& data, const ProblemParams& params) {
  auto need_positive = [](double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x)) throw Error(ErrorCode::config_error, std::string(name) + " must be positive");
  };
  if (data.layout == Layout::dual) {
    if (params.loss != LossKind::logistic || params.reg != RegKind::l2) {
      throw Error(ErrorCode::config_error, "the dual layout supports logistic loss with l2 regularization only");
    }
    need_positive(params.mu, "mu");
    return Problem{ProblemSpec{SmoothLoss::quadratic_dual(params.mu, data.matrix.rows()), Regularizer::box_entropy_dual()},
                   signed_columns(data.matrix, data.labels)};
  }

  const std::size_t m = data.matrix.rows();
  if (data.labels.size() != m || data.targets.size() != m) {
    throw Error(ErrorCode::length_mismatch, "one label per row expected in the primal layout");
  }
  SmoothLoss loss = params.loss == LossKind::least_squares ? SmoothLoss::least_squares(data.targets)
                                                           : SmoothLoss::logistic(data.labels);
  Regularizer reg = Regularizer::l2(1.0);
  switch (params.reg) {
    case RegKind::l2:
      need_positive(params.mu, "mu");
      reg = Regularizer::l2(params.mu);
      break;
    case RegKind::l1:
      need_positive(params.lambda, "lambda");
      if (params.bound < 0.0) throw Error(ErrorCode::config_error, "bound must be non-negative");
      reg = params.bound > 0.0 ? Regularizer::l1(params.lambda, params.bound) : Regularizer::l1(params.lambda);
      break;
    case RegKind::elastic_net:
      need_positive(params.lambda, "lambda");
      need_positive(params.mu, "mu");
      reg = Regularizer::elastic_net(params.lambda, params.mu);
      break;
  }
  return Problem{ProblemSpec{std::move(loss), reg}, data.matrix};
}

}  // namespace adn
