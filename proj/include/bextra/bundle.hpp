#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace bextra {

/// Affine minorant x -> a^T x + b.
struct Cut {
  Eigen::VectorXd a;
  double b = 0.0;

  double value_at(const Eigen::VectorXd& x) const { return a.dot(x) + b; }
};

enum class ModelKind { single_cut, polyak, cutting_plane, polyak_cutting_plane, two_cut };

const char* model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

/// How update_model changed the cut list; lets callers realign warm-started
/// dual multipliers with the surviving rows.
struct ModelUpdate {
  int evicted_front = 0;
  bool appended = false;
  bool reset = false;  // cut list was rebuilt from scratch
};

/// Piecewise-linear surrogate: max over cuts, optionally clamped below by a
/// scalar floor (Polyak-type models). Starts empty; the first update_model
/// installs the initial cut.
class CutSet {
 public:
  explicit CutSet(ModelKind kind, int window = 0,
                  std::optional<double> floor = std::nullopt);

  /// max_j (a_j^T x + b_j), lower-clamped to the floor when present.
  double evaluate(const Eigen::VectorXd& x) const;

  /// Slope of a maximizing cut at x. Ties go to the most recent cut; a
  /// strictly active floor yields the zero vector.
  Eigen::VectorXd subgradient(const Eigen::VectorXd& x) const;

  /// Incorporates the exact value/gradient at x_new according to the model
  /// kind. Rejects non-finite inputs.
  ModelUpdate update_model(const Eigen::VectorXd& x_new, double f_val, const Eigen::VectorXd& grad);

  const std::vector<Cut>& cuts() const { return cuts_; }
  std::optional<double> floor() const { return floor_; }
  ModelKind kind() const { return kind_; }
  int window() const { return window_; }
  bool empty() const { return cuts_.empty(); }

  /// Gram matrix of the stored slopes, entry (p, q) = a_p . a_q, maintained
  /// incrementally across updates so per-iteration solvers can skip the
  /// m^2 d rebuild. Square with side cuts().size().
  const Eigen::MatrixXd& slope_gram() const { return gram_; }

 private:
  ModelKind kind_;
  int window_;
  std::optional<double> floor_;
  std::vector<Cut> cuts_;
  Eigen::MatrixXd gram_;

  void rebuild_gram();
};

}  // namespace bextra
