#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace bextra {

/// One agent's smooth convex objective: value/gradient callables plus the
/// smoothness constant and a scalar lower bound (gamma, -inf when unknown).
struct ObjectiveOracle {
  int dim = 0;
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  double smoothness = 0.0;
  double lower_bound = -std::numeric_limits<double>::infinity();
};

/// Raw least-squares data, kept alongside the oracles so the closed-form
/// optimum stays computable.
struct LeastSquaresData {
  std::vector<Eigen::MatrixXd> P;
  std::vector<Eigen::VectorXd> q;
};

struct Problem {
  int n = 0;
  std::vector<ObjectiveOracle> oracles;
  double smoothness = 0.0;  // max_i L_i
  std::optional<Eigen::VectorXd> reference_optimum;
  std::optional<LeastSquaresData> least_squares;

  int dim() const { return oracles.empty() ? 0 : oracles.front().dim; }
};

/// f_i(x) = 1/(2n) ||P_i x - q_i||^2 with P_i entries drawn from N(2, 2) and
/// q_i entries from N(1, 0.5) (mean, variance). Deterministic per seed.
Problem least_squares_instance(int n, int d, int eta, std::uint64_t seed);

/// Wraps explicit least-squares data (P_i, q_i) in a Problem.
Problem least_squares_problem(LeastSquaresData data);

/// Solves sum_i P_i^T P_i x = sum_i P_i^T q_i, falling back to the
/// pseudoinverse when the normal matrix is rank deficient.
Eigen::VectorXd global_optimum_least_squares(const Problem& p);

/// max_i L_i
double smoothness_constant(const Problem& p);

/// Stacked gradient: row i holds grad f_i(x_i).
Eigen::MatrixXd stacked_gradient(const Problem& p, const Eigen::MatrixXd& x);

/// f(x) = sum_i f_i(x_i) over the stacked iterate.
double stacked_value(const Problem& p, const Eigen::MatrixXd& x);

}  // namespace bextra
