#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "bextra/graph.hpp"
#include "bextra/mixing.hpp"

using namespace bextra;

namespace {

Graph path3() { return Graph(3, {{0, 1}, {1, 2}}); }

// Independent lambda_min estimate: power iteration on c*I - Wt, which has top
// eigenvalue c - lambda_min(Wt) for c above the spectral radius.
double lambda_min_by_power_iteration(const Eigen::MatrixXd& wt) {
  const int n = static_cast<int>(wt.rows());
  const double c = 2.0;  // Wt eigenvalues live in (0, 1]
  const Eigen::MatrixXd shifted = c * Eigen::MatrixXd::Identity(n, n) - wt;
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(n, 1.0, 2.0).normalized();
  double top = 0.0;
  for (int it = 0; it < 2000; ++it) {
    Eigen::VectorXd sv = shifted * v;
    top = v.dot(sv);
    v = sv.normalized();
  }
  return c - top;
}

}  // namespace

TEST_CASE("metropolis weights on the path graph match hand evaluation") {
  const Eigen::MatrixXd w = metropolis_weights(path3());
  CHECK(w(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(w(1, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(w(0, 2) == 0.0);
  CHECK(w(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(w(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(w(2, 2) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("metropolis weights on a single edge") {
  const Eigen::MatrixXd w = metropolis_weights(Graph(2, {{0, 1}}));
  CHECK(w(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(w(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(w(1, 1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("metropolis weights are row-stochastic, symmetric, nonnegative") {
  Graph g = random_connected_graph(20, 32, 7);
  const Eigen::MatrixXd w = metropolis_weights(g);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(20);
  CHECK((w * ones - ones).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((w - w.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(w.minCoeff() >= 0.0);
}

TEST_CASE("laplacian weights: single edge with tau = 0.5 averages exactly") {
  const Eigen::MatrixXd w = laplacian_weights(Graph(2, {{0, 1}}), 0.5);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(w(i, j) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("laplacian weights: spectrum lies in (-1, 1] for legal tau") {
  Graph g = random_connected_graph(12, 20, 4);
  const Eigen::MatrixXd lap = graph_laplacian(g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_l(lap, Eigen::EigenvaluesOnly);
  const double lmax = es_l.eigenvalues().maxCoeff();

  for (double tau : {0.3 / lmax, 1.0 / lmax, 1.9999 / lmax}) {
    const Eigen::MatrixXd w = laplacian_weights(g, tau);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > -1.0);
    CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-12);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(12);
    CHECK((w * ones - ones).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("laplacian weights reject tau outside (0, 2/lambda_max)") {
  Graph g = path3();
  const Eigen::MatrixXd lap = graph_laplacian(g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap, Eigen::EigenvaluesOnly);
  const double lmax = es.eigenvalues().maxCoeff();
  CHECK_THROWS_AS(laplacian_weights(g, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(laplacian_weights(g, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(laplacian_weights(g, 2.0 / lmax), std::invalid_argument);  // strict bound
  CHECK_THROWS_AS(laplacian_weights(g, 3.0 / lmax), std::invalid_argument);
}

TEST_CASE("make_mixing_pair: n=1 degenerate network gives Wt = I") {
  Graph lone(1, {});
  MixingPair p = make_mixing_pair(Eigen::MatrixXd::Identity(1, 1), lone);
  CHECK(p.Wt(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p.lambda_min_Wt == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("make_mixing_pair on the Metropolis path matches (W + I)/2 by hand") {
  MixingPair p = make_mixing_pair(metropolis_weights(path3()), path3());
  CHECK(p.Wt(0, 0) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(p.Wt(1, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(p.Wt(2, 2) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(p.Wt(0, 1) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(p.Wt(1, 2) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(p.Wt(0, 2) == 0.0);
  CHECK(p.lambda_min_Wt > 0.0);
}

TEST_CASE("metropolis pairs validate on assorted connected graphs") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    Graph g = random_connected_graph(15, 24, seed);
    MixingPair p = make_mixing_pair(metropolis_weights(g), g);
    Assumption4Report rep = validate_assumption4(p, g, 1e-10);
    INFO(rep.describe());
    CHECK(rep.all_ok());
    CHECK(p.lambda_min_Wt > 0.0);
  }
}

TEST_CASE("eigendecomposition lambda_min agrees with power iteration") {
  Graph g = random_connected_graph(20, 32, 7);
  MixingPair p = make_mixing_pair(metropolis_weights(g), g);
  CHECK(p.lambda_min_Wt ==
        doctest::Approx(lambda_min_by_power_iteration(p.Wt)).epsilon(1e-8));
}

TEST_CASE("validation catches a negative diagonal entry via the spectral check") {
  Graph g = Graph(2, {{0, 1}});
  Eigen::MatrixXd w(2, 2);
  // Symmetric, row sums 1, right sparsity -- but w_ii < 0 drags an eigenvalue
  // of Wt = (W + I)/2 below zero (here {1, -0.5}), breaking Wt > 0.
  w << -0.5, 1.5, 1.5, -0.5;
  MixingPair p;
  p.W = w;
  p.Wt = 0.5 * (w + Eigen::MatrixXd::Identity(2, 2));
  Assumption4Report rep = validate_assumption4(p, g, 1e-10);
  CHECK_FALSE(rep.positive_definite_ok);
  CHECK_FALSE(rep.all_ok());
  CHECK_THROWS_AS(make_mixing_pair(w, g), std::invalid_argument);
}

TEST_CASE("validation catches Wt = I on a multi-node graph (null space too big)") {
  Graph g = Graph(2, {{0, 1}});
  MixingPair p;
  p.W = Eigen::MatrixXd::Identity(2, 2);
  p.Wt = Eigen::MatrixXd::Identity(2, 2);  // W - Wt = 0: null space is everything
  Assumption4Report rep = validate_assumption4(p, g, 1e-10);
  CHECK_FALSE(rep.null_space_ok);
  CHECK_FALSE(rep.all_ok());
}

TEST_CASE("validation catches symmetry and sparsity violations") {
  Graph g = path3();
  MixingPair good = make_mixing_pair(metropolis_weights(g), g);

  MixingPair lopsided = good;
  lopsided.W(0, 1) += 1e-6;
  CHECK_FALSE(validate_assumption4(lopsided, g, 1e-10).symmetry_ok);

  MixingPair offpattern = good;
  offpattern.W(0, 2) = 0.1;
  offpattern.W(2, 0) = 0.1;
  CHECK_FALSE(validate_assumption4(offpattern, g, 1e-10).sparsity_ok);
}

TEST_CASE("(I - Wt) annihilates the ones vector") {
  Graph g = random_connected_graph(9, 14, 31);
  MixingPair p = make_mixing_pair(metropolis_weights(g), g);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(9);
  const Eigen::MatrixXd iwt = Eigen::MatrixXd::Identity(9, 9) - p.Wt;
  CHECK((iwt * ones).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("make_mixing_pair rejects size mismatch") {
  CHECK_THROWS_AS(make_mixing_pair(Eigen::MatrixXd::Identity(2, 2), path3()),
                  std::invalid_argument);
}
