#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "bextra/algorithms.hpp"
#include "bextra/graph.hpp"
#include "bextra/mixing.hpp"
#include "bextra/problem.hpp"

namespace bextra {

/// One algorithm configuration in an experiment. For `run` every arm needs a
/// step size; `sweep` ignores per-arm alphas and uses the sweep grid instead.
struct ArmSpec {
  std::string name;  // CSV file stem; generated from the fields when empty
  AlgorithmKind algorithm = AlgorithmKind::extra;
  ModelKind model = ModelKind::cutting_plane;
  int window = 0;
  double alpha = 0.0;
  bool has_alpha = false;
};

struct ExperimentSpec {
  int n = 20;
  int d = 100;
  int eta = 6;
  int edges = 32;
  std::uint64_t seed = 1;
  std::string weights = "metropolis";  // or "laplacian" (requires tau)
  double tau = 0.0;
  std::string x0_mode = "zeros";  // or "gaussian"
  int max_iters = 1000;
  double conv_tol = 1e-6;
  double inner_tol = 1e-10;
  int inner_max_iters = 10000;
  int threads = 1;
  std::vector<ArmSpec> arms;
  std::vector<double> sweep_alphas;
};

/// Parses the flat key-value config format (`key = value`, `#` comments,
/// repeated `arm =` lines). Errors name the offending key and line.
ExperimentSpec parse_spec_text(const std::string& text);
ExperimentSpec parse_spec_file(const std::string& path);

/// Shape/field validation shared by both commands; for_sweep additionally
/// requires a nonempty step-size grid. Throws std::invalid_argument naming
/// the field.
void validate_spec(const ExperimentSpec& spec, bool for_sweep);

/// The instance every arm shares: topology, weights, objectives, and x0, all
/// derived deterministically from the master seed.
struct PreparedExperiment {
  Graph graph;
  MixingPair mixing;
  Problem problem;
  Eigen::MatrixXd x0;
  std::uint64_t graph_seed = 0;
  std::uint64_t instance_seed = 0;
  std::uint64_t x0_seed = 0;
  std::uint64_t instance_hash = 0;  // FNV-1a over edges, P_i, q_i, x0
};

PreparedExperiment prepare(const ExperimentSpec& spec);

/// Renders a spec back into parseable config text (used for the snapshot).
std::string spec_to_text(const ExperimentSpec& spec);

/// Runs every arm at its own step size and writes `<out_dir>/<arm>.csv` plus
/// a re-runnable `snapshot.txt`. Returns the paths written.
std::vector<std::string> cmd_run(const ExperimentSpec& spec, const std::string& out_dir);

/// Runs every (arm, alpha) pair of the grid with early stop at conv_tol and
/// writes `<out_dir>/sweep.csv` plus the snapshot. Returns the sweep path.
std::string cmd_sweep(const ExperimentSpec& spec, const std::string& out_dir);

}  // namespace bextra
