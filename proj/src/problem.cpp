#include "bextra/problem.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <stdexcept>

namespace bextra {

namespace {

double spectral_norm_sq(const Eigen::MatrixXd& m) {
  // lambda_max(M^T M) via the smaller Gram matrix.
  const Eigen::MatrixXd gram =
      m.rows() <= m.cols() ? Eigen::MatrixXd(m * m.transpose()) : Eigen::MatrixXd(m.transpose() * m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace

Problem least_squares_problem(LeastSquaresData data) {
  const int n = static_cast<int>(data.P.size());
  if (n == 0 || data.q.size() != data.P.size())
    throw std::invalid_argument("least_squares_problem: inconsistent data");
  const int d = static_cast<int>(data.P.front().cols());

  Problem prob;
  prob.n = n;
  prob.least_squares = std::move(data);
  const LeastSquaresData& ls = *prob.least_squares;
  prob.oracles.reserve(n);
  for (int i = 0; i < n; ++i) {
    if (ls.P[i].cols() != d || ls.q[i].size() != ls.P[i].rows())
      throw std::invalid_argument("least_squares_problem: agent " + std::to_string(i) +
                                  " has mismatched shapes");
    ObjectiveOracle oracle;
    oracle.dim = d;
    // Captured by value so oracles stay valid if the Problem is copied.
    const Eigen::MatrixXd P = ls.P[i];
    const Eigen::VectorXd q = ls.q[i];
    oracle.value = [P, q, n](const Eigen::VectorXd& x) {
      return (P * x - q).squaredNorm() / (2.0 * n);
    };
    oracle.gradient = [P, q, n](const Eigen::VectorXd& x) {
      return Eigen::VectorXd(P.transpose() * (P * x - q) / n);
    };
    oracle.smoothness = spectral_norm_sq(P) / n;
    oracle.lower_bound = 0.0;
    prob.oracles.push_back(std::move(oracle));
  }
  prob.smoothness = smoothness_constant(prob);
  return prob;
}

Problem least_squares_instance(int n, int d, int eta, std::uint64_t seed) {
  if (n < 1 || d < 1 || eta < 1)
    throw std::invalid_argument("least_squares_instance: n, d, eta must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  const double p_sigma = std::sqrt(2.0);
  const double q_sigma = std::sqrt(0.5);

  LeastSquaresData data;
  data.P.reserve(n);
  data.q.reserve(n);
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd P(eta, d);
    for (int r = 0; r < eta; ++r)
      for (int c = 0; c < d; ++c) P(r, c) = 2.0 + p_sigma * unit(rng);
    Eigen::VectorXd q(eta);
    for (int r = 0; r < eta; ++r) q(r) = 1.0 + q_sigma * unit(rng);
    data.P.push_back(std::move(P));
    data.q.push_back(std::move(q));
  }
  return least_squares_problem(std::move(data));
}

Eigen::VectorXd global_optimum_least_squares(const Problem& p) {
  if (!p.least_squares) throw std::invalid_argument("global_optimum_least_squares: not a least-squares instance");
  const LeastSquaresData& ls = *p.least_squares;
  const int d = static_cast<int>(ls.P.front().cols());
  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
  for (std::size_t i = 0; i < ls.P.size(); ++i) {
    normal.noalias() += ls.P[i].transpose() * ls.P[i];
    rhs.noalias() += ls.P[i].transpose() * ls.q[i];
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  if (ldlt.info() == Eigen::Success) {
    Eigen::VectorXd x = ldlt.solve(rhs);
    if ((normal * x - rhs).norm() <= 1e-8 * (1.0 + rhs.norm())) return x;
  }
  // Rank-deficient normal equations: minimum-norm solution.
  return normal.completeOrthogonalDecomposition().solve(rhs);
}

double smoothness_constant(const Problem& p) {
  double l = 0.0;
  for (const auto& oracle : p.oracles) l = std::max(l, oracle.smoothness);
  return l;
}

Eigen::MatrixXd stacked_gradient(const Problem& p, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd g(x.rows(), x.cols());
  for (int i = 0; i < p.n; ++i) g.row(i) = p.oracles[i].gradient(x.row(i).transpose()).transpose();
  return g;
}

double stacked_value(const Problem& p, const Eigen::MatrixXd& x) {
  double v = 0.0;
  for (int i = 0; i < p.n; ++i) v += p.oracles[i].value(x.row(i).transpose());
  return v;
}

}  // namespace bextra
