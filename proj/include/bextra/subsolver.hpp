#pragma once

#include <Eigen/Dense>

namespace bextra {

/// min_x  max_j (a_j^T x + b_j) + 1/(2 alpha) ||x - c||^2,
/// with A holding the slopes a_j^T as rows.
struct ProxPWLInstance {
  Eigen::MatrixXd A;  // m x d
  Eigen::VectorXd b;  // m
  Eigen::VectorXd c;  // d, prox center
  double alpha = 1.0;
};

enum class SolveStatus { converged, iteration_limit };

struct ProxPWLSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;  // simplex multipliers, x = c - alpha * A^T lambda
  double gap = 0.0;        // achieved primal-dual gap
  int inner_iters = 0;
  SolveStatus status = SolveStatus::converged;
};

/// Maximizes the dual h(lambda) = -alpha/2 ||A^T lambda||^2 + lambda^T (A c + b)
/// over the probability simplex by accelerated projected gradient with
/// restarts, then recovers x = c - alpha A^T lambda. m = 1 and m = 2 are
/// closed forms. Stops when the primal-dual gap falls below
/// tol * (1 + |h(lambda)|); hitting max_iters first is reported through the
/// status field, with the achieved gap left for the caller to judge.
/// `gram`, when given, must equal A A^T; callers that keep the Gram matrix of
/// their cuts current across solves can pass it to skip the m^2 d rebuild.
ProxPWLSolution solve_prox_pwl(const ProxPWLInstance& inst, double tol = 1e-10,
                               int max_iters = 10000,
                               const Eigen::VectorXd* warm_start = nullptr,
                               const Eigen::MatrixXd* gram = nullptr);

/// Euclidean projection onto {v >= 0, 1^T v = 1} by threshold scanning.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v);

double dual_value(const ProxPWLInstance& inst, const Eigen::VectorXd& lambda);
Eigen::VectorXd dual_gradient(const ProxPWLInstance& inst, const Eigen::VectorXd& lambda);

}  // namespace bextra
