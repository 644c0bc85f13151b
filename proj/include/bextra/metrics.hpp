#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bextra/problem.hpp"

namespace bextra {

/// One row of a run's trajectory. `cumulative_kkt_sum` is the running
/// left-hand side of the summability bound,
///   sum_{t=1..k} [ (1/alpha) tr(x^t^T (I - Wt) x^t) + (1/L) ||grad f(x^t) + q*||_F^2 ],
/// zero on the k = 0 row. `inner_iters_total` accumulates the subproblem
/// iteration counts over all agents and rounds so far (zero for EXTRA).
struct IterationMetrics {
  int k = 0;
  double consensus_residual = 0.0;
  double grad_residual = 0.0;
  double rel_error = 0.0;
  double dual_mean_norm = 0.0;
  double cumulative_kkt_sum = 0.0;
  long long inner_iters_total = 0;
};

/// Symmetric PSD square root; eigenvalues clipped at zero before the root.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& S);

/// Moore-Penrose pseudoinverse of a symmetric matrix via eigendecomposition,
/// zeroing eigenvalues of magnitude below cutoff_rel * max |eigenvalue|.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& S, double cutoff_rel = 1e-12);

/// Fixed per-run data for metric evaluation: the consensus seminorm factor
/// H = (I - Wt)^{1/2}, the reference stack 1 (x*)^T, q* = -grad f(x*), and the
/// constant right-hand side of the summability bound.
class MetricsContext {
 public:
  MetricsContext(const Problem& problem, const Eigen::MatrixXd& Wt,
                 const Eigen::VectorXd& x_star, const Eigen::MatrixXd& x0,
                 const Eigen::MatrixXd& q0, double alpha);

  /// tr(x^T (I - Wt) x), evaluated as ||H x||_F^2 so round-off cannot drive
  /// it negative.
  double consensus_residual(const Eigen::MatrixXd& x) const;
  /// ||grad f(x) + q*||_F^2
  double grad_residual(const Eigen::MatrixXd& x) const;
  /// ||x - 1 (x*)^T||_F / ||1 (x*)^T||_F
  double rel_error(const Eigen::MatrixXd& x) const;
  /// ||1^T q|| — zero for exact dual iterates of either algorithm.
  double dual_mean_norm(const Eigen::MatrixXd& q) const;

  /// Builds the k-th trajectory row and advances the running KKT sum
  /// (rows must be produced in order; k = 0 contributes nothing to the sum).
  IterationMetrics record(int k, const Eigen::MatrixXd& x, const Eigen::MatrixXd& q,
                          long long inner_iters_total);

  double bound() const { return bound_; }
  const Eigen::MatrixXd& x_star_stack() const { return x_star_stack_; }
  const Eigen::MatrixXd& q_star() const { return q_star_; }

 private:
  const Problem* problem_;
  Eigen::MatrixXd H_;
  Eigen::MatrixXd x_star_stack_;
  Eigen::MatrixXd q_star_;
  double x_star_stack_norm_;
  double alpha_;
  double bound_;
  double kkt_sum_ = 0.0;
};

/// (consensus_residual, grad_residual) for a single snapshot, with
/// q_star = -grad f(x* stack) supplied by the caller.
std::pair<double, double> kkt_residuals(const Eigen::MatrixXd& x, const Eigen::MatrixXd& q_star,
                                        const Eigen::MatrixXd& Wt, const Problem& problem);

/// Right-hand side of the summability bound:
///   (1/alpha) ||x0 - x*||_Wt^2 + alpha ||q0 + grad f(x*)||_{(I-Wt)^+}^2.
double theorem1_bound(const Eigen::MatrixXd& x0, const Eigen::MatrixXd& q0,
                      const Eigen::VectorXd& x_star, const Eigen::MatrixXd& Wt, double alpha,
                      const Problem& problem);

/// Prefix statistics over k >= 1 exhibiting the o(1/k) / O(1/k) residual
/// rates: best-so-far residuals, running averages, and their k-scaled forms.
struct RateRow {
  int k = 0;
  double min_consensus = 0.0;
  double min_grad = 0.0;
  double avg_consensus = 0.0;
  double avg_grad = 0.0;
  double k_min_consensus = 0.0;
  double k_min_grad = 0.0;
  double k_avg_consensus = 0.0;  // equals the prefix sum
  double k_avg_grad = 0.0;
};

std::vector<RateRow> rate_statistics(const std::vector<IterationMetrics>& trajectory);

}  // namespace bextra
