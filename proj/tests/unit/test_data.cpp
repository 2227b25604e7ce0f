#include <doctest.h>

#include <cmath>
#include <sstream>

#include "adn/data.hpp"
#include "adn/engine.hpp"
#include "adn/error.hpp"
#include "oracles.hpp"

using namespace adn;

TEST_CASE("libsvm parsing in both layouts") {
  std::istringstream in("+1 1:2.0\n-1 2:1.5\n");
  const auto data = parse_libsvm(in, Layout::primal, false);
  CHECK(data.num_examples() == 2);
  const auto m = oracle::dense(data.matrix);
  REQUIRE(m.rows() == 2);
  REQUIRE(m.cols() == 2);
  CHECK(m(0, 0) == 2.0);
  CHECK(m(1, 1) == 1.5);
  CHECK(m(0, 1) == 0.0);
  CHECK(data.labels == std::vector<double>{1.0, -1.0});

  std::istringstream again("+1 1:2.0\n-1 2:1.5\n");
  const auto dual = parse_libsvm(again, Layout::dual, false);
  CHECK((oracle::dense(dual.matrix) - m.transpose()).norm() == 0.0);
}

TEST_CASE("libsvm normalization and labels") {
  std::istringstream in("0 1:3 2:4\n# comment\n\n2 3:-2\n");
  const auto data = parse_libsvm(in, Layout::dual);
  CHECK(data.labels == std::vector<double>{-1.0, 1.0});
  CHECK(data.targets == std::vector<double>{0.0, 2.0});
  const auto m = oracle::dense(data.matrix);
  CHECK(m.col(0).norm() == doctest::Approx(1.0));
  CHECK(m(0, 0) == doctest::Approx(0.6));
  CHECK(m(2, 1) == doctest::Approx(-1.0));
}

TEST_CASE("libsvm errors") {
  std::istringstream empty("");
  CHECK_THROWS_AS(parse_libsvm(empty, Layout::primal), Error);
  std::istringstream bad("1 3:abc\n");
  try {
    parse_libsvm(bad, Layout::primal);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
  }
  std::istringstream later("1 1:1\n1 0:2\n");
  try {
    parse_libsvm(later, Layout::primal);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_libsvm(std::filesystem::path("/nonexistent/file.svm"), Layout::primal), Error);
}

TEST_CASE("libsvm write and read back") {
  SyntheticSpec spec;
  spec.d = 12;
  spec.n = 7;
  spec.density = 0.4;
  spec.seed = 3;
  const auto data = generate_synthetic(spec);
  std::stringstream buf;
  write_libsvm(buf, data);
  const auto back = parse_libsvm(buf, Layout::primal, false);
  CHECK(back.labels == data.labels);
  const auto x = oracle::dense(data.matrix);
  const auto y = oracle::dense(back.matrix);
  // trailing all-zero features are not visible in the text form
  REQUIRE(y.cols() <= x.cols());
  CHECK((x.leftCols(y.cols()) - y).norm() == 0.0);
}

TEST_CASE("synthetic generation") {
  SyntheticSpec spec;
  spec.d = 2;
  spec.n = 2;
  spec.density = 1.0;
  spec.seed = 7;
  const auto a = generate_synthetic(spec);
  const auto b = generate_synthetic(spec);
  CHECK((oracle::dense(a.matrix) - oracle::dense(b.matrix)).norm() == 0.0);
  CHECK(a.labels == b.labels);

  spec.d = 30;
  spec.n = 40;
  spec.density = 0.2;
  const auto c = generate_synthetic(spec);
  for (std::size_t i = 0; i < c.matrix.cols(); ++i) CHECK(std::sqrt(c.matrix.col_sq_norm(i)) == doctest::Approx(1.0));

  spec.density = 0.0;
  CHECK_THROWS_AS(generate_synthetic(spec), Error);
  spec.density = 1.5;
  CHECK_THROWS_AS(generate_synthetic(spec), Error);
}

TEST_CASE("noise-free least squares recovers the planted fit") {
  SyntheticSpec spec;
  spec.d = 60;
  spec.n = 15;
  spec.density = 0.5;
  spec.sparsity = 0.5;
  spec.seed = 21;
  const auto data = generate_synthetic(spec);
  ProblemParams params;
  params.loss = LossKind::least_squares;
  params.reg = RegKind::l2;
  params.mu = 1e-9;
  const auto problem = build_problem(data, params);
  const auto p = partition_columns(spec.n, 1, PartitionStrategy::contiguous);
  SolverBudget budget;
  budget.epochs = 5000;
  budget.tolerance = 1e-15;
  StopCriteria stop;
  stop.max_rounds = 50;
  stop.gap_tol = 1e-10;
  const auto res = run_adn(problem.spec, problem.matrix, p, TrustConfig{}, budget, stop);
  CHECK(res.gap <= 1e-10);
  const auto fit = problem.matrix.multiply(res.alpha);
  const auto truth = data.matrix.multiply(data.planted);
  double err = 0.0;
  for (std::size_t j = 0; j < fit.size(); ++j) err = std::max(err, std::abs(fit[j] - truth[j]));
  CHECK(err <= 1e-6);
}

TEST_CASE("problem construction") {
  SyntheticSpec spec;
  spec.d = 10;
  spec.n = 8;
  spec.density = 0.5;
  spec.layout = Layout::dual;
  const auto data = generate_synthetic(spec);
  ProblemParams params;
  params.loss = LossKind::logistic;
  params.reg = RegKind::l2;
  params.mu = 0.1;
  const auto p = build_problem(data, params);
  CHECK(p.spec.loss.kind() == SmoothLoss::Kind::quadratic_dual);
  CHECK(p.spec.reg.kind() == Regularizer::Kind::box_entropy_dual);
  CHECK(p.spec.loss.lambda() == 0.1);
  params.reg = RegKind::l1;
  CHECK_THROWS_AS(build_problem(data, params), Error);
}
