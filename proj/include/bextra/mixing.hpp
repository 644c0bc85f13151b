#pragma once

#include <Eigen/Dense>
#include <string>

#include "bextra/graph.hpp"

namespace bextra {

/// Weight matrices governing the consensus updates. Wt is always (W + I)/2.
struct MixingPair {
  Eigen::MatrixXd W;
  Eigen::MatrixXd Wt;
  double lambda_min_Wt = 0.0;
};

/// Metropolis weights: w_ij = 1/(1 + max{d_i, d_j}) on edges, diagonal fills
/// the row to sum 1.
Eigen::MatrixXd metropolis_weights(const Graph& g);

/// Laplacian weights W = I - tau * L_G, valid for 0 < tau < 2/lambda_max(L_G).
Eigen::MatrixXd laplacian_weights(const Graph& g, double tau);

/// Graph Laplacian (degree on the diagonal, -1 on edges).
Eigen::MatrixXd graph_laplacian(const Graph& g);

/// Per-condition outcome of the weight-matrix validation.
struct Assumption4Report {
  bool sparsity_ok = false;        // off-pattern entries vanish
  bool symmetry_ok = false;        // W and Wt symmetric
  bool row_sum_ok = false;         // Wt * 1 = 1
  bool null_space_ok = false;      // Null(W - Wt) = span(1)
  bool positive_definite_ok = false;  // lambda_min(Wt) > 0
  bool spectral_upper_ok = false;  // (I + Wt)/2 - Wt PSD
  bool spectral_lower_ok = false;  // Wt - W PSD
  double lambda_min_Wt = 0.0;

  bool all_ok() const {
    return sparsity_ok && symmetry_ok && row_sum_ok && null_space_ok && positive_definite_ok &&
           spectral_upper_ok && spectral_lower_ok;
  }
  std::string describe() const;
};

Assumption4Report validate_assumption4(const MixingPair& p, const Graph& g, double tol = 1e-10);

/// Builds Wt = (W + I)/2, computes lambda_min(Wt) by dense symmetric
/// eigendecomposition, and validates the pair. Throws std::invalid_argument
/// when any validation condition fails.
MixingPair make_mixing_pair(const Eigen::MatrixXd& W, const Graph& g, double tol = 1e-10);

}  // namespace bextra
