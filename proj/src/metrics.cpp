#include "bextra/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bextra {

namespace {

void require_symmetric(const Eigen::MatrixXd& S, const char* what) {
  if (S.rows() != S.cols()) throw std::invalid_argument(std::string(what) + ": matrix not square");
}

}  // namespace

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& S) {
  require_symmetric(S, "psd_sqrt");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success) throw std::runtime_error("psd_sqrt: eigendecomposition failed");
  Eigen::VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& S, double cutoff_rel) {
  require_symmetric(S, "pseudo_inverse");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("pseudo_inverse: eigendecomposition failed");
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  const double cutoff = cutoff_rel * scale;
  Eigen::VectorXd inv(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    inv[i] = std::abs(ev[i]) > cutoff ? 1.0 / ev[i] : 0.0;
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

MetricsContext::MetricsContext(const Problem& problem, const Eigen::MatrixXd& Wt,
                               const Eigen::VectorXd& x_star, const Eigen::MatrixXd& x0,
                               const Eigen::MatrixXd& q0, double alpha)
    : problem_(&problem), alpha_(alpha) {
  const Eigen::Index n = Wt.rows();
  if (problem.n != static_cast<int>(n))
    throw std::invalid_argument("metrics: agent count mismatch between problem and Wt");
  if (x_star.size() != problem.dim())
    throw std::invalid_argument("metrics: reference optimum has wrong dimension");
  const Eigen::MatrixXd IWt = Eigen::MatrixXd::Identity(n, n) - Wt;
  H_ = psd_sqrt(IWt);
  x_star_stack_ = Eigen::VectorXd::Ones(n) * x_star.transpose();
  x_star_stack_norm_ = x_star_stack_.norm();
  q_star_ = -stacked_gradient(problem, x_star_stack_);
  bound_ = theorem1_bound(x0, q0, x_star, Wt, alpha, problem);
}

double MetricsContext::consensus_residual(const Eigen::MatrixXd& x) const {
  return (H_ * x).squaredNorm();
}

double MetricsContext::grad_residual(const Eigen::MatrixXd& x) const {
  return (stacked_gradient(*problem_, x) + q_star_).squaredNorm();
}

double MetricsContext::rel_error(const Eigen::MatrixXd& x) const {
  if (x_star_stack_norm_ == 0.0) return (x - x_star_stack_).norm();
  return (x - x_star_stack_).norm() / x_star_stack_norm_;
}

double MetricsContext::dual_mean_norm(const Eigen::MatrixXd& q) const {
  return q.colwise().sum().norm();
}

IterationMetrics MetricsContext::record(int k, const Eigen::MatrixXd& x,
                                        const Eigen::MatrixXd& q,
                                        long long inner_iters_total) {
  IterationMetrics m;
  m.k = k;
  m.consensus_residual = consensus_residual(x);
  m.grad_residual = grad_residual(x);
  m.rel_error = rel_error(x);
  m.dual_mean_norm = dual_mean_norm(q);
  if (k >= 1)
    kkt_sum_ += m.consensus_residual / alpha_ + m.grad_residual / problem_->smoothness;
  m.cumulative_kkt_sum = kkt_sum_;
  m.inner_iters_total = inner_iters_total;
  return m;
}

std::pair<double, double> kkt_residuals(const Eigen::MatrixXd& x, const Eigen::MatrixXd& q_star,
                                        const Eigen::MatrixXd& Wt, const Problem& problem) {
  const Eigen::Index n = Wt.rows();
  const Eigen::MatrixXd H = psd_sqrt(Eigen::MatrixXd::Identity(n, n) - Wt);
  const double consensus = (H * x).squaredNorm();
  const double grad = (stacked_gradient(problem, x) + q_star).squaredNorm();
  return {consensus, grad};
}

double theorem1_bound(const Eigen::MatrixXd& x0, const Eigen::MatrixXd& q0,
                      const Eigen::VectorXd& x_star, const Eigen::MatrixXd& Wt, double alpha,
                      const Problem& problem) {
  if (!(alpha > 0.0)) throw std::invalid_argument("theorem1_bound: alpha must be positive");
  const Eigen::Index n = Wt.rows();
  const Eigen::MatrixXd x_star_stack = Eigen::VectorXd::Ones(n) * x_star.transpose();
  const Eigen::MatrixXd dx = x0 - x_star_stack;
  const double term1 = (dx.transpose() * Wt * dx).trace() / alpha;
  const Eigen::MatrixXd dq = q0 + stacked_gradient(problem, x_star_stack);
  const Eigen::MatrixXd pinv = pseudo_inverse(Eigen::MatrixXd::Identity(n, n) - Wt);
  const double term2 = alpha * (dq.transpose() * pinv * dq).trace();
  return term1 + term2;
}

std::vector<RateRow> rate_statistics(const std::vector<IterationMetrics>& trajectory) {
  if (trajectory.empty()) throw std::invalid_argument("rate_statistics: empty trajectory");
  std::vector<RateRow> rows;
  rows.reserve(trajectory.size());
  double min_c = std::numeric_limits<double>::infinity();
  double min_g = std::numeric_limits<double>::infinity();
  double sum_c = 0.0;
  double sum_g = 0.0;
  int count = 0;
  for (const IterationMetrics& m : trajectory) {
    if (m.k == 0) continue;  // rate results index from the first update
    min_c = std::min(min_c, m.consensus_residual);
    min_g = std::min(min_g, m.grad_residual);
    sum_c += m.consensus_residual;
    sum_g += m.grad_residual;
    ++count;
    RateRow r;
    r.k = m.k;
    r.min_consensus = min_c;
    r.min_grad = min_g;
    r.avg_consensus = sum_c / count;
    r.avg_grad = sum_g / count;
    r.k_min_consensus = count * min_c;
    r.k_min_grad = count * min_g;
    r.k_avg_consensus = sum_c;
    r.k_avg_grad = sum_g;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace bextra
