#include "bextra/mixing.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bextra {

Eigen::MatrixXd metropolis_weights(const Graph& g) {
  const int n = g.num_nodes();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (auto [i, j] : g.edges()) {
    const double wij = 1.0 / (1.0 + std::max(g.degree(i), g.degree(j)));
    w(i, j) = wij;
    w(j, i) = wij;
  }
  for (int i = 0; i < n; ++i) w(i, i) = 1.0 - w.row(i).sum();
  return w;
}

Eigen::MatrixXd graph_laplacian(const Graph& g) {
  const int n = g.num_nodes();
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (auto [i, j] : g.edges()) {
    lap(i, j) = -1.0;
    lap(j, i) = -1.0;
    lap(i, i) += 1.0;
    lap(j, j) += 1.0;
  }
  return lap;
}

Eigen::MatrixXd laplacian_weights(const Graph& g, double tau) {
  const Eigen::MatrixXd lap = graph_laplacian(g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap, Eigen::EigenvaluesOnly);
  const double lmax = es.eigenvalues().maxCoeff();
  if (!(tau > 0.0) || (lmax > 0.0 && tau >= 2.0 / lmax))
    throw std::invalid_argument("laplacian_weights: tau must lie in (0, 2/lambda_max(L))");
  const int n = g.num_nodes();
  return Eigen::MatrixXd::Identity(n, n) - tau * lap;
}

std::string Assumption4Report::describe() const {
  std::ostringstream os;
  auto line = [&](const char* name, bool ok) { os << name << ": " << (ok ? "pass" : "FAIL") << '\n'; };
  line("sparsity", sparsity_ok);
  line("symmetry", symmetry_ok);
  line("row_sum", row_sum_ok);
  line("null_space", null_space_ok);
  line("positive_definite", positive_definite_ok);
  line("spectral_upper", spectral_upper_ok);
  line("spectral_lower", spectral_lower_ok);
  os << "lambda_min(Wt) = " << lambda_min_Wt << '\n';
  return os.str();
}

Assumption4Report validate_assumption4(const MixingPair& p, const Graph& g, double tol) {
  Assumption4Report rep;
  const int n = g.num_nodes();
  if (p.W.rows() != n || p.W.cols() != n || p.Wt.rows() != n || p.Wt.cols() != n) return rep;

  rep.sparsity_ok = true;
  for (int i = 0; i < n && rep.sparsity_ok; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && !g.has_edge(i, j) &&
          (std::abs(p.W(i, j)) > tol || std::abs(p.Wt(i, j)) > tol)) {
        rep.sparsity_ok = false;
        break;
      }

  rep.symmetry_ok = (p.W - p.W.transpose()).cwiseAbs().maxCoeff() <= tol &&
                    (p.Wt - p.Wt.transpose()).cwiseAbs().maxCoeff() <= tol;

  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  rep.row_sum_ok = (p.Wt * ones - ones).cwiseAbs().maxCoeff() <= tol;

  // Null(W - Wt) = span(1): exactly one vanishing eigenvalue of Wt - W, with
  // (W - Wt) 1 = 0. n = 1 degenerates to rank 0.
  const Eigen::MatrixXd diff = 0.5 * ((p.Wt - p.W) + (p.Wt - p.W).transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_diff(diff, Eigen::EigenvaluesOnly);
  int null_dim = 0;
  for (int i = 0; i < n; ++i)
    if (std::abs(es_diff.eigenvalues()(i)) <= tol) ++null_dim;
  rep.null_space_ok = null_dim == 1 && ((p.W - p.Wt) * ones).cwiseAbs().maxCoeff() <= tol;

  const Eigen::MatrixXd wt_sym = 0.5 * (p.Wt + p.Wt.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_wt(wt_sym, Eigen::EigenvaluesOnly);
  rep.lambda_min_Wt = es_wt.eigenvalues().minCoeff();
  rep.positive_definite_ok = rep.lambda_min_Wt > tol;

  const Eigen::MatrixXd upper =
      0.5 * (Eigen::MatrixXd::Identity(n, n) + wt_sym) - wt_sym;  // (I - Wt)/2
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_up(0.5 * (upper + upper.transpose()),
                                                       Eigen::EigenvaluesOnly);
  rep.spectral_upper_ok = es_up.eigenvalues().minCoeff() >= -tol;
  rep.spectral_lower_ok = es_diff.eigenvalues().minCoeff() >= -tol;

  return rep;
}

MixingPair make_mixing_pair(const Eigen::MatrixXd& W, const Graph& g, double tol) {
  const int n = g.num_nodes();
  if (W.rows() != n || W.cols() != n)
    throw std::invalid_argument("make_mixing_pair: W size does not match graph");
  MixingPair pair;
  pair.W = W;
  pair.Wt = 0.5 * (W + Eigen::MatrixXd::Identity(n, n));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (pair.Wt + pair.Wt.transpose()),
                                                    Eigen::EigenvaluesOnly);
  pair.lambda_min_Wt = es.eigenvalues().minCoeff();
  const Assumption4Report rep = validate_assumption4(pair, g, tol);
  if (!rep.all_ok())
    throw std::invalid_argument("make_mixing_pair: weight matrix fails validation\n" +
                                rep.describe());
  return pair;
}

}  // namespace bextra
