#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "bextra/bundle.hpp"
#include "bextra/graph.hpp"
#include "bextra/metrics.hpp"
#include "bextra/mixing.hpp"
#include "bextra/problem.hpp"
#include "bextra/subsolver.hpp"

namespace bextra {

enum class AlgorithmKind { extra, bundle_extra };

const char* algorithm_kind_name(AlgorithmKind kind);
AlgorithmKind algorithm_kind_from_name(const std::string& name);

struct RunConfig {
  AlgorithmKind algorithm = AlgorithmKind::extra;
  ModelKind model = ModelKind::cutting_plane;  // bundle_extra only
  int window = 0;                              // sliding-window length m
  double alpha = 0.0;
  int max_iters = 1;
  double inner_tol = 1e-10;
  int inner_max_iters = 10000;
  int threads = 1;
  double stop_rel_error = 0.0;  // > 0: stop once rel_error falls to this
  const Graph* graph = nullptr;
  const MixingPair* mixing = nullptr;
  const Problem* problem = nullptr;
  Eigen::MatrixXd x0;  // n x d; empty means all zeros
};

// ---------------------------------------------------------------------------
// Per-agent building blocks. These are the only functions that read network
// state, and each touches x-rows of its own agent and its graph neighbors
// only — which the test harness enforces by poisoning all other rows.
// ---------------------------------------------------------------------------

/// sum_{j in N_i ∪ {i}} M_ij x_j for a graph-patterned weight matrix M,
/// accumulated in a fixed order (self term first, then neighbors ascending).
Eigen::VectorXd local_mix_row(const Eigen::MatrixXd& M, const Graph& g, const Eigen::MatrixXd& x,
                              int i);

/// Primal update of the primal-dual form: x_i <- mix_i(x) - alpha (grad f_i(x_i) + q_i).
Eigen::VectorXd extra_agent_primal(int i, const Eigen::MatrixXd& x, const Eigen::MatrixXd& q,
                                   const Eigen::MatrixXd& Wt, const Graph& g, double alpha,
                                   const Problem& p);

/// Shared dual ascent step: q_i <- q_i + (1/alpha)(x_i_new - mix_i(x_new)).
Eigen::VectorXd agent_dual_update(int i, const Eigen::MatrixXd& x_new, const Eigen::MatrixXd& q,
                                  const Eigen::MatrixXd& Wt, const Graph& g, double alpha);

struct BundleAgentResult {
  Eigen::VectorXd x_new;
  Eigen::VectorXd lambda;  // multipliers aligned with [cuts..., floor?]
  int inner_iters = 0;
  bool warning = false;
};

/// One agent's bundle primal update: refresh the model with the exact
/// value/gradient at x_i (Assumption 5 exactness), form the prox center
/// c_i = mix_i(x) - alpha q_i, and solve the piecewise-linear prox subproblem.
BundleAgentResult bundle_agent_primal(int i, const Eigen::MatrixXd& x, const Eigen::MatrixXd& q,
                                      const Eigen::MatrixXd& Wt, const Graph& g, double alpha,
                                      const Problem& p, CutSet& model,
                                      const Eigen::VectorXd* warm_start, double inner_tol,
                                      int inner_max_iters);

/// Builds the subproblem rows from a model: the cuts in order, then the floor
/// as a zero-slope row when present.
ProxPWLInstance instance_from_model(const CutSet& model, const Eigen::VectorXd& c, double alpha);

/// Maps multipliers from the pre-update row layout onto the post-update one
/// (evicted leading cuts dropped, appended cut starts at zero). Returns
/// nullopt when the model was rebuilt and no sensible mapping exists.
std::optional<Eigen::VectorXd> realign_warm_start(const Eigen::VectorXd& old_warm, bool has_floor,
                                                  const ModelUpdate& delta, int new_cut_count);

// ---------------------------------------------------------------------------
// Whole-network steppers.
// ---------------------------------------------------------------------------

/// Primal-dual form: x^{k+1} = Wt x^k - alpha (grad f(x^k) + q^k),
///                   q^{k+1} = q^k + (1/alpha)(I - Wt) x^{k+1}.
struct ExtraPrimalDualState {
  Eigen::MatrixXd x;
  Eigen::MatrixXd q;
  int k = 0;
};

/// q^0 = (1/alpha)(I - Wt) x^0.
ExtraPrimalDualState init_extra_primal_dual(const Eigen::MatrixXd& x0, const Eigen::MatrixXd& Wt,
                                            const Graph& g, double alpha);

void extra_primal_dual_step(ExtraPrimalDualState& state, const MixingPair& mix, const Graph& g,
                            double alpha, const Problem& p, int threads = 1);

/// Two-term recursion form, kept for the equivalence check:
/// x^1 = W x^0 - alpha grad f(x^0), then
/// x^{k+2} = 2 Wt x^{k+1} - Wt x^k - alpha (grad f(x^{k+1}) - grad f(x^k)).
struct ExtraRecursionState {
  Eigen::MatrixXd x;          // x^k
  Eigen::MatrixXd prev_x;     // x^{k-1}, empty until the first step
  Eigen::MatrixXd prev_grad;  // grad f(x^{k-1})
  int k = 0;
};

ExtraRecursionState init_extra_recursion(const Eigen::MatrixXd& x0);

void extra_recursion_step(ExtraRecursionState& state, const MixingPair& mix, const Graph& g,
                          double alpha, const Problem& p, int threads = 1);

struct BundleExtraState {
  Eigen::MatrixXd x;
  Eigen::MatrixXd q;
  int k = 0;
  std::vector<CutSet> models;
  std::vector<Eigen::VectorXd> warm;  // previous multipliers per agent
  long long inner_iters_total = 0;
  int inner_warnings = 0;
};

/// Installs q^0 = (1/alpha)(I - Wt) x^0 and one empty model per agent; the
/// floor for Polyak-type models comes from each oracle's lower bound.
BundleExtraState init_bundle_extra(const Eigen::MatrixXd& x0, const Eigen::MatrixXd& Wt,
                                   const Graph& g, double alpha, ModelKind model, int window,
                                   const Problem& p);

void bundle_extra_step(BundleExtraState& state, const MixingPair& mix, const Graph& g,
                       double alpha, const Problem& p, double inner_tol, int inner_max_iters,
                       int threads = 1);

// ---------------------------------------------------------------------------
// Orchestration.
// ---------------------------------------------------------------------------

struct RunResult {
  std::vector<IterationMetrics> trajectory;  // row 0 is the initial point
  Eigen::MatrixXd x_final;
  Eigen::MatrixXd q_final;
  bool diverged = false;
  int inner_warnings = 0;
  double theorem_bound = 0.0;
};

/// Runs the configured algorithm for max_iters synchronous rounds (stopping
/// early on divergence: non-finite iterates or ||x|| beyond 1e12 times the
/// initial scale), recording metrics each round. Requires the problem to
/// carry a reference optimum. Output is independent of the thread count.
RunResult run(const RunConfig& config);

}  // namespace bextra
