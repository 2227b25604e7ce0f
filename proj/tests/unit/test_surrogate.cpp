#include <doctest.h>

#include <random>

#include "adn/error.hpp"
#include "adn/surrogate.hpp"
#include "oracles.hpp"

using namespace adn;

namespace {

struct Instance {
  SparseColMatrix a;
  ProblemSpec spec;
  std::vector<double> alpha;
  std::vector<double> v;
};

Instance logistic_instance(std::size_t d, std::size_t n, std::uint64_t seed) {
  auto labels = oracle::random_vector(d, 1.0, seed);
  for (double& y : labels) y = y > 0 ? 1.0 : -1.0;
  Instance in{oracle::random_matrix(d, n, 0.4, seed + 1),
              ProblemSpec{SmoothLoss::logistic(labels), Regularizer::elastic_net(0.1, 0.5)},
              oracle::random_vector(n, 0.5, seed + 2), {}};
  in.v = in.a.multiply(in.alpha);
  return in;
}

std::vector<LocalSubproblem> split(const Instance& in, const Partition& p, const ModelSnapshot& snap, double sigma) {
  std::vector<LocalSubproblem> subs;
  for (std::size_t k = 0; k < p.num_parts(); ++k) {
    subs.emplace_back(in.a, p.members(k), k, p.num_parts(), snap, p.extract(k, in.alpha), in.spec.reg, sigma);
  }
  return subs;
}

}  // namespace

TEST_CASE("anchor value of the local model") {
  const auto in = logistic_instance(6, 9, 1);
  const auto p = partition_columns(9, 3, PartitionStrategy::contiguous);
  const auto snap = ModelSnapshot::capture(in.spec.loss, in.v);
  const auto subs = split(in, p, snap, 1.3);
  for (const auto& s : subs) {
    const std::vector<double> zero(s.size(), 0.0);
    const double expected = in.spec.loss.value(in.v) / 3.0 + regularizer_sum(in.spec.reg, s.alpha());
    CHECK(s.model_value(zero) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(s.anchor_value() == doctest::Approx(expected).epsilon(1e-14));
    CHECK(s.quadratic_term(zero) == 0.0);
  }
  const std::vector<double> zero(9, 0.0);
  const double total = evaluate_objective(in.spec, in.a, in.alpha, in.v).total;
  CHECK(eval_global_model(subs, zero) == doctest::Approx(total).epsilon(1e-12));
}

TEST_CASE("global model equals explicit block-diagonal assembly") {
  for (std::size_t k : {1, 2, 4}) {
    const auto in = logistic_instance(7, 12, 10 + k);
    const auto p = partition_columns(12, k, PartitionStrategy::round_robin);
    const auto snap = ModelSnapshot::capture(in.spec.loss, in.v);
    const auto subs = split(in, p, snap, 0.8);
    const auto delta = oracle::random_vector(12, 0.3, 99 + k);
    const double ref = oracle::global_model(in.spec, oracle::dense(in.a), p, oracle::vec(in.alpha), oracle::vec(delta), 0.8);
    CHECK(eval_global_model(subs, delta) == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("model is exact for least squares with K = 1 and sigma = 1") {
  const auto a = oracle::random_matrix(5, 6, 0.6, 3);
  const auto b = oracle::random_vector(5, 1.0, 4);
  const ProblemSpec spec{SmoothLoss::least_squares(b), Regularizer::l2(0.2)};
  const auto alpha = oracle::random_vector(6, 1.0, 5);
  const auto v = a.multiply(alpha);
  const auto p = partition_columns(6, 1, PartitionStrategy::contiguous);
  const auto snap = ModelSnapshot::capture(spec.loss, v);
  LocalSubproblem sub(a, p.members(0), 0, 1, snap, alpha, spec.reg, 1.0);
  for (int t = 0; t < 10; ++t) {
    const auto delta = oracle::random_vector(6, 1.0, 100 + t);
    std::vector<double> moved(6);
    for (std::size_t i = 0; i < 6; ++i) moved[i] = alpha[i] + delta[i];
    const double obj = evaluate_objective(spec, a, moved, a.multiply(moved)).total;
    CHECK(sub.model_value(delta) == doctest::Approx(obj).epsilon(1e-10));
  }
}

TEST_CASE("quadratic term") {
  const std::vector<Triplet> t = {{0, 0, 3.0}, {0, 1, 4.0}, {1, 1, 1.0}};
  const auto a = SparseColMatrix::from_triplets(t, 2, 2);
  const ProblemSpec spec{SmoothLoss::least_squares({0.0, 0.0}), Regularizer::l2(1.0)};
  const std::vector<double> alpha(2, 0.0), v(2, 0.0);
  const auto snap = ModelSnapshot::capture(spec.loss, v);
  const std::vector<std::size_t> members = {0, 1};
  LocalSubproblem sub(a, members, 0, 1, snap, alpha, spec.reg, 1.0);
  CHECK(sub.quadratic_term(std::vector<double>{1.0, 0.0}) == doctest::Approx(25.0));

  const auto in = logistic_instance(6, 8, 50);
  const auto p = partition_columns(8, 2, PartitionStrategy::contiguous);
  const auto s2 = ModelSnapshot::capture(in.spec.loss, in.v);
  const auto subs = split(in, p, s2, 1.0);
  const auto h = oracle::block_hessian(oracle::dense(in.a), oracle::vec(s2.curvature), p);
  const auto delta = oracle::random_vector(8, 1.0, 51);
  for (std::size_t k = 0; k < 2; ++k) {
    const auto block = p.extract(k, delta);
    oracle::VectorXd full = oracle::VectorXd::Zero(8);
    for (std::size_t q = 0; q < block.size(); ++q) full(static_cast<Eigen::Index>(p.members(k)[q])) = block[q];
    const double ref = full.dot(h * full);
    CHECK(subs[k].quadratic_term(block) == doctest::Approx(ref).epsilon(1e-12));
    CHECK(subs[k].quadratic_term(block) >= 0.0);
  }
}

TEST_CASE("separability of the global model") {
  const auto in = logistic_instance(6, 10, 70);
  const auto p = partition_columns(10, 2, PartitionStrategy::contiguous);
  const auto snap = ModelSnapshot::capture(in.spec.loss, in.v);
  const auto subs = split(in, p, snap, 2.0);
  auto delta = oracle::random_vector(10, 0.5, 71);
  for (std::size_t i : p.members(0)) delta[i] = 0.0;
  const double others = subs[0].anchor_value();
  CHECK(eval_global_model(subs, delta) - others == doctest::Approx(subs[1].model_value(p.extract(1, delta))).epsilon(1e-12));
}

TEST_CASE("inconsistent subproblems are rejected") {
  const auto in = logistic_instance(5, 6, 80);
  const auto p = partition_columns(6, 2, PartitionStrategy::contiguous);
  const auto snap = ModelSnapshot::capture(in.spec.loss, in.v);
  std::vector<LocalSubproblem> subs;
  subs.emplace_back(in.a, p.members(0), 0, 2, snap, p.extract(0, in.alpha), in.spec.reg, 1.0);
  subs.emplace_back(in.a, p.members(1), 1, 2, snap, p.extract(1, in.alpha), in.spec.reg, 2.0);
  const std::vector<double> zero(6, 0.0);
  try {
    eval_global_model(subs, zero);
    FAIL("expected InconsistentSnapshots");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::inconsistent_snapshots);
  }
  const std::vector<double> wrong(2, 0.0);
  CHECK_THROWS_AS(subs[0].model_value(wrong), Error);
}
