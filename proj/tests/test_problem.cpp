#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>

#include "bextra/problem.hpp"

using namespace bextra;

namespace {

Eigen::VectorXd central_difference_gradient(const ObjectiveOracle& oracle,
                                            const Eigen::VectorXd& x) {
  const double h = 1e-6;
  Eigen::VectorXd g(x.size());
  for (int j = 0; j < x.size(); ++j) {
    Eigen::VectorXd hi = x, lo = x;
    hi[j] += h;
    lo[j] -= h;
    g[j] = (oracle.value(hi) - oracle.value(lo)) / (2.0 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("least_squares_instance rejects non-positive shapes") {
  CHECK_THROWS_AS(least_squares_instance(0, 3, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(least_squares_instance(2, 0, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(least_squares_instance(2, 3, 0, 1), std::invalid_argument);
}

TEST_CASE("instance shapes and defaults") {
  Problem p = least_squares_instance(4, 7, 3, 9);
  CHECK(p.n == 4);
  CHECK(p.dim() == 7);
  REQUIRE(p.least_squares.has_value());
  for (int i = 0; i < 4; ++i) {
    CHECK(p.least_squares->P[i].rows() == 3);
    CHECK(p.least_squares->P[i].cols() == 7);
    CHECK(p.least_squares->q[i].size() == 3);
    CHECK(p.oracles[i].lower_bound == 0.0);
    CHECK(p.oracles[i].smoothness > 0.0);
  }
}

TEST_CASE("same seed gives bit-identical data, different seeds differ") {
  Problem a = least_squares_instance(3, 5, 4, 77);
  Problem b = least_squares_instance(3, 5, 4, 77);
  Problem c = least_squares_instance(3, 5, 4, 78);
  for (int i = 0; i < 3; ++i) {
    CHECK((a.least_squares->P[i].array() == b.least_squares->P[i].array()).all());
    CHECK((a.least_squares->q[i].array() == b.least_squares->q[i].array()).all());
  }
  CHECK_FALSE((a.least_squares->P[0].array() == c.least_squares->P[0].array()).all());
}

TEST_CASE("value vanishes when the residual vanishes") {
  // Build explicit data where P x = q has the known solution x = ones.
  LeastSquaresData data;
  Eigen::MatrixXd P(2, 2);
  P << 1.0, 2.0, 0.0, 3.0;
  data.P = {P};
  data.q = {P * Eigen::Vector2d::Ones()};
  Problem prob = least_squares_problem(std::move(data));
  CHECK(prob.oracles[0].value(Eigen::Vector2d::Ones()) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(prob.oracles[0].gradient(Eigen::Vector2d::Ones()).norm() <= 1e-15);
}

TEST_CASE("gradient matches central finite differences") {
  Problem p = least_squares_instance(3, 6, 4, 5);
  std::mt19937_64 rng(17);
  std::normal_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < p.n; ++i) {
    for (int rep = 0; rep < 3; ++rep) {
      Eigen::VectorXd x(6);
      for (int j = 0; j < 6; ++j) x[j] = unit(rng);
      const Eigen::VectorXd g = p.oracles[i].gradient(x);
      const Eigen::VectorXd fd = central_difference_gradient(p.oracles[i], x);
      CHECK((g - fd).norm() <= 1e-6 * (1.0 + g.norm()));
    }
  }
}

TEST_CASE("convexity gap is nonnegative over sampled pairs") {
  Problem p = least_squares_instance(2, 4, 5, 21);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> unit(0.0, 2.0);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd x(4), y(4);
    for (int j = 0; j < 4; ++j) {
      x[j] = unit(rng);
      y[j] = unit(rng);
    }
    for (const auto& oracle : p.oracles) {
      const double gap = oracle.value(y) - oracle.value(x) - oracle.gradient(x).dot(y - x);
      CHECK(gap >= -1e-10);
    }
  }
}

TEST_CASE("values respect the lower bound at random points") {
  Problem p = least_squares_instance(2, 3, 4, 33);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> unit(0.0, 5.0);
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd x(3);
    for (int j = 0; j < 3; ++j) x[j] = unit(rng);
    for (const auto& oracle : p.oracles) CHECK(oracle.value(x) >= oracle.lower_bound);
  }
}

TEST_CASE("gradient Lipschitz bound holds on sampled pairs") {
  Problem p = least_squares_instance(3, 4, 6, 44);
  std::mt19937_64 rng(12);
  std::normal_distribution<double> unit(0.0, 1.5);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd x(4), y(4);
    for (int j = 0; j < 4; ++j) {
      x[j] = unit(rng);
      y[j] = unit(rng);
    }
    for (const auto& oracle : p.oracles) {
      const double lhs = (oracle.gradient(y) - oracle.gradient(x)).norm();
      CHECK(lhs <= oracle.smoothness * (y - x).norm() * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("global optimum: identity system returns the target") {
  LeastSquaresData data;
  data.P = {Eigen::MatrixXd::Identity(3, 3)};
  Eigen::VectorXd v(3);
  v << 1.0, -2.0, 0.5;
  data.q = {v};
  Problem prob = least_squares_problem(std::move(data));
  CHECK((global_optimum_least_squares(prob) - v).norm() <= 1e-12);
}

TEST_CASE("global optimum: two scalar agents average their targets") {
  // f_i = (x - c_i)^2 / (2 * 2) realized as P_i = [1], q_i = [c_i], n = 2.
  LeastSquaresData data;
  data.P = {Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1)};
  data.q = {Eigen::VectorXd::Constant(1, 3.0), Eigen::VectorXd::Constant(1, -1.0)};
  Problem prob = least_squares_problem(std::move(data));
  const Eigen::VectorXd x_star = global_optimum_least_squares(prob);
  CHECK(x_star[0] == doctest::Approx(1.0).epsilon(1e-12));  // (3 + -1)/2
}

TEST_CASE("global optimum is stationary for the summed gradient") {
  Problem p = least_squares_instance(20, 100, 6, 1);
  const Eigen::VectorXd x_star = global_optimum_least_squares(p);
  Eigen::VectorXd total = Eigen::VectorXd::Zero(100);
  for (const auto& oracle : p.oracles) total += oracle.gradient(x_star);
  double scale = 0.0;
  for (int i = 0; i < p.n; ++i)
    scale += (p.least_squares->P[i].transpose() * p.least_squares->q[i]).norm();
  CHECK(total.norm() <= 1e-8 * (1.0 + scale));
}

TEST_CASE("global optimum survives a rank-deficient normal matrix") {
  // One agent, wide P with a null space; the pseudoinverse path must engage.
  LeastSquaresData data;
  Eigen::MatrixXd P(1, 3);
  P << 1.0, 1.0, 1.0;
  data.P = {P};
  data.q = {Eigen::VectorXd::Constant(1, 3.0)};
  Problem prob = least_squares_problem(std::move(data));
  const Eigen::VectorXd x = global_optimum_least_squares(prob);
  CHECK((P * x)(0) == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("smoothness constant: single identity quadratic has L = 1") {
  // (1/2)||x||^2 as a one-agent least-squares instance: P = I, q = 0, n = 1.
  LeastSquaresData data;
  data.P = {Eigen::MatrixXd::Identity(4, 4)};
  data.q = {Eigen::VectorXd::Zero(4)};
  Problem prob = least_squares_problem(std::move(data));
  CHECK(smoothness_constant(prob) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("smoothness equals the top eigenvalue of P^T P / n") {
  Problem p = least_squares_instance(3, 4, 5, 10);
  for (int i = 0; i < p.n; ++i) {
    const Eigen::MatrixXd gram =
        p.least_squares->P[i].transpose() * p.least_squares->P[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    CHECK(p.oracles[i].smoothness ==
          doctest::Approx(es.eigenvalues().maxCoeff() / p.n).epsilon(1e-12));
  }
  CHECK(smoothness_constant(p) == doctest::Approx(p.smoothness).epsilon(1e-15));
}

TEST_CASE("scaling every P by 2 scales L by 4") {
  Problem base = least_squares_instance(3, 4, 5, 10);
  LeastSquaresData scaled = *base.least_squares;
  for (auto& P : scaled.P) P *= 2.0;
  Problem big = least_squares_problem(std::move(scaled));
  CHECK(smoothness_constant(big) ==
        doctest::Approx(4.0 * smoothness_constant(base)).epsilon(1e-12));
}

TEST_CASE("stacked gradient and value agree with per-agent evaluation") {
  Problem p = least_squares_instance(4, 3, 2, 55);
  Eigen::MatrixXd x(4, 3);
  x << 1, 2, 3, -1, 0, 1, 0.5, 0.5, 0.5, 2, -2, 2;
  const Eigen::MatrixXd g = stacked_gradient(p, x);
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Eigen::VectorXd xi = x.row(i).transpose();
    CHECK((g.row(i).transpose() - p.oracles[i].gradient(xi)).norm() <= 1e-15);
    total += p.oracles[i].value(xi);
  }
  CHECK(stacked_value(p, x) == doctest::Approx(total).epsilon(1e-15));
}
