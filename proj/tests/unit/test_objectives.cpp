#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "adn/error.hpp"
#include "adn/objectives.hpp"
#include "oracles.hpp"

using namespace adn;

namespace {

std::vector<SmoothLoss> all_losses(std::size_t d, std::uint64_t seed) {
  auto labels = oracle::random_vector(d, 1.0, seed);
  for (double& y : labels) y = y > 0 ? 1.0 : -1.0;
  return {SmoothLoss::least_squares(oracle::random_vector(d, 1.0, seed + 1)), SmoothLoss::logistic(labels),
          SmoothLoss::quadratic_dual(0.7, oracle::random_vector(d, 0.5, seed + 2))};
}

}  // namespace

TEST_CASE("loss values at reference points") {
  const std::vector<double> b = {1.0, -2.0, 0.5};
  const auto ls = SmoothLoss::least_squares(b);
  CHECK(ls.value(b) == 0.0);
  for (double g : ls.gradient(b)) CHECK(g == 0.0);
  for (double h : ls.hessian_diag(std::vector<double>{4.0, 5.0, 6.0})) CHECK(h == 1.0);

  const auto lg = SmoothLoss::logistic({1.0, 1.0, 1.0});
  const std::vector<double> zero(3, 0.0);
  CHECK(lg.value(zero) == doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-15));
  for (double g : lg.gradient(zero)) CHECK(g == doctest::Approx(-0.5));
  for (double h : lg.hessian_diag(zero)) CHECK(h == doctest::Approx(0.25));

  CHECK(ls.tau() == 1.0);
  CHECK(lg.tau() == 4.0);
  CHECK(SmoothLoss::quadratic_dual(0.3, 2).tau() == 0.3);
}

TEST_CASE("logistic value at a large margin matches extended precision") {
  using big = boost::multiprecision::cpp_bin_float_50;
  const auto lg = SmoothLoss::logistic({1.0});
  const std::vector<double> v = {35.0};
  const double ref = static_cast<double>(boost::multiprecision::log1p(boost::multiprecision::exp(big(-35))));
  CHECK(std::abs(lg.value(v) - ref) <= 1e-15);
}

TEST_CASE("length mismatches throw") {
  const auto ls = SmoothLoss::least_squares({1.0, 2.0});
  const std::vector<double> v(3, 0.0);
  CHECK_THROWS_AS(ls.value(v), Error);
  CHECK_THROWS_AS(ls.gradient(v), Error);
  CHECK_THROWS_AS(ls.hessian_diag(v), Error);
}

TEST_CASE("gradient and curvature agree with the dense oracle and with finite differences") {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 10; ++trial) {
    for (const auto& loss : all_losses(6, gen())) {
      const auto v = oracle::random_vector(6, 2.0, gen());
      const auto g = loss.gradient(v);
      const auto h = loss.hessian_diag(v);
      const auto og = oracle::loss_gradient(loss, oracle::vec(v));
      const auto oh = oracle::loss_hessian_diag(loss, oracle::vec(v));
      CHECK(loss.value(v) == doctest::Approx(oracle::loss_value(loss, oracle::vec(v))).epsilon(1e-13));
      for (std::size_t j = 0; j < 6; ++j) {
        CHECK(g[j] == doctest::Approx(og(static_cast<Eigen::Index>(j))).epsilon(1e-13));
        CHECK(h[j] == doctest::Approx(oh(static_cast<Eigen::Index>(j))).epsilon(1e-13));
      }
      // central differences, h = 1e-5
      double num = 0.0, den = 0.0;
      for (std::size_t j = 0; j < 6; ++j) {
        auto up = v, dn = v;
        up[j] += 1e-5;
        dn[j] -= 1e-5;
        const double fd = (loss.value(up) - loss.value(dn)) / 2e-5;
        num += (fd - g[j]) * (fd - g[j]);
        den += g[j] * g[j];
      }
      CHECK(std::sqrt(num) <= 1e-6 * std::sqrt(den));
    }
  }
}

TEST_CASE("smoothness certificate with the analytic tau") {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 100; ++trial) {
    for (const auto& loss : all_losses(5, gen())) {
      const auto v = oracle::random_vector(5, 3.0, gen());
      const auto u = oracle::random_vector(5, 3.0, gen());
      const auto g = loss.gradient(v);
      double lin = 0.0, sq = 0.0;
      for (std::size_t j = 0; j < 5; ++j) {
        lin += g[j] * (u[j] - v[j]);
        sq += (u[j] - v[j]) * (u[j] - v[j]);
      }
      CHECK(loss.value(u) <= loss.value(v) + lin + sq / (2.0 * loss.tau()) + 1e-12);
    }
  }
}

TEST_CASE("bregman term is exact for quadratics and stable for tiny steps") {
  std::mt19937_64 gen(31);
  for (const auto& loss : all_losses(4, gen())) {
    const auto v = oracle::random_vector(4, 1.0, gen());
    const auto dv = oracle::random_vector(4, 0.3, gen());
    std::vector<double> w(4);
    for (std::size_t j = 0; j < 4; ++j) w[j] = v[j] + dv[j];
    const auto g = loss.gradient(v);
    double lin = 0.0;
    for (std::size_t j = 0; j < 4; ++j) lin += g[j] * dv[j];
    CHECK(loss.bregman(v, dv) == doctest::Approx(loss.value(w) - loss.value(v) - lin).epsilon(1e-9));
  }
  // For a tiny step the logistic Bregman term is about h/2 * dv^2.
  const auto lg = SmoothLoss::logistic({1.0});
  const std::vector<double> v = {0.3};
  const std::vector<double> dv = {1e-7};
  const double h = lg.hessian_diag(v)[0];
  CHECK(lg.bregman(v, dv) == doctest::Approx(0.5 * h * 1e-14).epsilon(1e-6));
}

TEST_CASE("regularizer values") {
  for (const auto& r : {Regularizer::l2(2.0), Regularizer::l1(0.5, 10.0), Regularizer::elastic_net(0.5, 1.0)}) {
    CHECK(r.value(0.0) == 0.0);
  }
  const auto l1 = Regularizer::l1(0.5, 10.0);
  CHECK(l1.value(-2.0) == 1.0);
  CHECK(std::isinf(l1.value(11.0)));
  CHECK(Regularizer::box_entropy_dual().value(0.5) == doctest::Approx(-std::log(2.0)));
  CHECK(std::isinf(Regularizer::box_entropy_dual().value(1.5)));
  CHECK(Regularizer::l2(3.0).strong_convexity() == 3.0);
  CHECK(l1.strong_convexity() == 0.0);
  CHECK(l1.support_bound() == 10.0);
  CHECK(std::isinf(Regularizer::l2(1.0).support_bound()));
  CHECK(Regularizer::box_entropy_dual().strong_convexity() == 4.0);
}

TEST_CASE("conjugate subgradients") {
  CHECK(Regularizer::l2(2.0).conjugate_subgradient(4.0) == 2.0);
  const auto l1 = Regularizer::l1(1.0, 5.0);
  CHECK(l1.conjugate_subgradient(0.5) == 0.0);
  CHECK(l1.conjugate_subgradient(-3.0) == -5.0);
  CHECK(l1.conjugate_subgradient(1.0) == 0.0);
}

TEST_CASE("Fenchel-Young holds with equality at the conjugate subgradient") {
  std::mt19937_64 gen(41);
  std::normal_distribution<double> normal(0.0, 3.0);
  const std::vector<Regularizer> regs = {Regularizer::l2(0.7), Regularizer::l1(1.0, 4.0), Regularizer::elastic_net(0.4, 1.3),
                                         Regularizer::box_entropy_dual()};
  for (const auto& r : regs) {
    for (int i = 0; i < 200; ++i) {
      const double w = normal(gen);
      const double u = r.conjugate_subgradient(w);
      CHECK(r.value(u) == doctest::Approx(u * w - r.conjugate(w)).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("prox operators") {
  const auto l1 = Regularizer::l1(1.0, 1e9);
  CHECK(l1.prox(0.4, 1.0) == 0.0);
  CHECK(l1.prox(3.0, 1.0) == 2.0);
  CHECK(Regularizer::l2(1.0).prox(2.0, 1.0) == 1.0);
  CHECK(Regularizer::l1(1.0, 1.5).prox(5.0, 1.0) == 1.5);

  // Fixed points: the unconstrained minimizer of g is returned unchanged.
  CHECK(Regularizer::l2(2.0).prox(0.0, 0.3) == 0.0);
  CHECK(l1.prox(0.0, 0.3) == 0.0);
  CHECK(Regularizer::box_entropy_dual().prox(0.5, 0.3) == doctest::Approx(0.5).epsilon(1e-14));

  // The entropy prox satisfies its optimality condition (x - z)/s + log(x/(1-x)) = 0.
  const auto ent = Regularizer::box_entropy_dual();
  for (double z : {-30.0, -2.0, 0.1, 0.9, 3.0, 40.0}) {
    for (double s : {1e-3, 0.5, 20.0}) {
      const double x = ent.prox(z, s);
      CHECK(x >= 0.0);
      CHECK(x <= 1.0);
      // the logit of the answer is -(x - z)/s; far enough out x rounds to 0 or 1
      if (x == 0.0 || x == 1.0) {
        CHECK(std::abs(z - x) / s > 36.0);
        continue;
      }
      CHECK(std::abs((x - z) / s + std::log(x / (1.0 - x))) <= 1e-8 * (1.0 + std::abs(z) / s));
    }
  }
}

TEST_CASE("objective evaluation") {
  // LS + l2 on A = [[1, 2], [0, 1]], b = (1, 1), mu = 0.5, alpha = (1, -1):
  // A alpha = (-1, -1), f = 1/2 (4 + 4) = 4, g = 0.25 (1 + 1) = 0.5.
  const std::vector<Triplet> t = {{0, 0, 1.0}, {1, 0, 2.0}, {1, 1, 1.0}};
  const auto a = SparseColMatrix::from_triplets(t, 2, 2);
  const ProblemSpec spec{SmoothLoss::least_squares({1.0, 1.0}), Regularizer::l2(0.5)};
  const std::vector<double> alpha = {1.0, -1.0};
  const auto v = a.multiply(alpha);
  const auto obj = evaluate_objective(spec, a, alpha, v, true);
  CHECK(obj.f_part == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(obj.g_part == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(obj.total == doctest::Approx(4.5).epsilon(1e-12));

  const ProblemSpec lg{SmoothLoss::logistic({1.0, -1.0}), Regularizer::l2(1.0)};
  const std::vector<double> zero(2, 0.0);
  CHECK(evaluate_objective(lg, a, zero, zero).total == doctest::Approx(2.0 * std::log(2.0)));

  const ProblemSpec boxed{SmoothLoss::least_squares({1.0, 1.0}), Regularizer::l1(1.0, 0.5)};
  CHECK(std::isinf(evaluate_objective(boxed, a, alpha, v).total));

  const std::vector<double> stale = {0.0, 0.0};
  try {
    evaluate_objective(spec, a, alpha, stale, true);
    FAIL("expected InconsistentSharedVector");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::inconsistent_shared_vector);
  }
}

TEST_CASE("duality gap: scalar example and optimum") {
  const std::vector<Triplet> one = {{0, 0, 1.0}};
  const auto a = SparseColMatrix::from_triplets(one, 1, 1);
  const ProblemSpec spec{SmoothLoss::least_squares({1.0}), Regularizer::l2(1.0)};
  const std::vector<double> alpha = {0.0}, v = {0.0};
  CHECK(duality_gap(spec, a, alpha, v) == doctest::Approx(0.5).epsilon(1e-15));
  // optimum alpha* = 1/2 with O* = 1/4, so suboptimality at 0 is 1/4
  const std::vector<double> opt = {0.5};
  CHECK(duality_gap(spec, a, opt, opt) <= 1e-15);
  CHECK(evaluate_objective(spec, a, alpha, v).total - evaluate_objective(spec, a, opt, opt).total == doctest::Approx(0.25));

  // a random ridge instance at its closed-form optimum
  const auto m = oracle::random_matrix(8, 12, 0.5, 77);
  const auto b = oracle::random_vector(8, 1.0, 78);
  const ProblemSpec ridge{SmoothLoss::least_squares(b), Regularizer::l2(0.3)};
  const auto x = oracle::stl(oracle::ridge_solution(oracle::dense(m), oracle::vec(b), 0.3));
  CHECK(duality_gap(ridge, m, x, m.multiply(x)) <= 1e-9);
}
