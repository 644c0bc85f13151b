#include "bextra/bundle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bextra {

const char* model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::single_cut: return "single_cut";
    case ModelKind::polyak: return "polyak";
    case ModelKind::cutting_plane: return "cutting_plane";
    case ModelKind::polyak_cutting_plane: return "polyak_cutting_plane";
    case ModelKind::two_cut: return "two_cut";
  }
  return "unknown";
}

ModelKind model_kind_from_name(const std::string& name) {
  if (name == "single_cut") return ModelKind::single_cut;
  if (name == "polyak") return ModelKind::polyak;
  if (name == "cutting_plane") return ModelKind::cutting_plane;
  if (name == "polyak_cutting_plane") return ModelKind::polyak_cutting_plane;
  if (name == "two_cut") return ModelKind::two_cut;
  throw std::invalid_argument("unknown model kind: " + name);
}

namespace {

bool uses_floor(ModelKind kind) {
  return kind == ModelKind::polyak || kind == ModelKind::polyak_cutting_plane;
}

bool same_cut(const Cut& lhs, const Cut& rhs) {
  const double db = std::abs(lhs.b - rhs.b);
  if (db > 1e-12) return false;  // cheap reject before touching the slopes
  return (lhs.a - rhs.a).norm() + db <= 1e-12;
}

}  // namespace

CutSet::CutSet(ModelKind kind, int window, std::optional<double> floor)
    : kind_(kind), window_(window), floor_(floor) {
  if (window < 0) throw std::invalid_argument("CutSet: window must be nonnegative");
  if (uses_floor(kind) && !floor_)
    throw std::invalid_argument("CutSet: Polyak-type models require a floor");
  if (!uses_floor(kind)) floor_.reset();
  if (floor_ && !std::isfinite(*floor_))
    throw std::invalid_argument("CutSet: floor must be finite");
}

double CutSet::evaluate(const Eigen::VectorXd& x) const {
  if (cuts_.empty()) throw std::logic_error("CutSet::evaluate: no cuts installed yet");
  double best = cuts_.front().value_at(x);
  for (std::size_t j = 1; j < cuts_.size(); ++j) best = std::max(best, cuts_[j].value_at(x));
  if (floor_) best = std::max(best, *floor_);
  return best;
}

Eigen::VectorXd CutSet::subgradient(const Eigen::VectorXd& x) const {
  if (cuts_.empty()) throw std::logic_error("CutSet::subgradient: no cuts installed yet");
  double best = cuts_.front().value_at(x);
  std::size_t best_j = 0;
  for (std::size_t j = 1; j < cuts_.size(); ++j) {
    const double v = cuts_[j].value_at(x);
    if (v >= best) {  // ties resolve to the most recent cut
      best = v;
      best_j = j;
    }
  }
  if (floor_ && *floor_ > best) return Eigen::VectorXd::Zero(x.size());
  return cuts_[best_j].a;
}

void CutSet::rebuild_gram() {
  const Eigen::Index m = static_cast<Eigen::Index>(cuts_.size());
  gram_.resize(m, m);
  for (Eigen::Index p = 0; p < m; ++p)
    for (Eigen::Index q = p; q < m; ++q)
      gram_(p, q) = gram_(q, p) =
          cuts_[static_cast<size_t>(p)].a.dot(cuts_[static_cast<size_t>(q)].a);
}

ModelUpdate CutSet::update_model(const Eigen::VectorXd& x_new, double f_val,
                                 const Eigen::VectorXd& grad) {
  if (!std::isfinite(f_val) || !x_new.allFinite() || !grad.allFinite())
    throw std::invalid_argument("CutSet::update_model: non-finite input");

  Cut fresh{grad, f_val - grad.dot(x_new)};
  ModelUpdate report;

  switch (kind_) {
    case ModelKind::single_cut:
    case ModelKind::polyak:
      cuts_.assign(1, std::move(fresh));
      report.reset = true;
      rebuild_gram();
      return report;

    case ModelKind::cutting_plane:
    case ModelKind::polyak_cutting_plane: {
      bool duplicate = false;
      for (const Cut& c : cuts_)
        if (same_cut(c, fresh)) {
          duplicate = true;
          break;
        }
      if (!duplicate) {
        // Grow the Gram matrix by one bordered row/column before the cut
        // list changes; entries use the same dot products a rebuild would.
        const Eigen::Index mo = static_cast<Eigen::Index>(cuts_.size());
        Eigen::MatrixXd grown(mo + 1, mo + 1);
        grown.topLeftCorner(mo, mo) = gram_;
        for (Eigen::Index p = 0; p < mo; ++p)
          grown(p, mo) = grown(mo, p) = cuts_[static_cast<size_t>(p)].a.dot(fresh.a);
        grown(mo, mo) = fresh.a.dot(fresh.a);
        gram_.swap(grown);
        cuts_.push_back(std::move(fresh));
        report.appended = true;
      }
      while (static_cast<int>(cuts_.size()) > window_ + 1) {
        cuts_.erase(cuts_.begin());
        ++report.evicted_front;
      }
      if (report.evicted_front > 0) {
        const Eigen::Index m = static_cast<Eigen::Index>(cuts_.size());
        gram_ = gram_.bottomRightCorner(m, m).eval();
      }
      return report;
    }

    case ModelKind::two_cut: {
      if (cuts_.empty()) {
        cuts_.push_back(std::move(fresh));
        report.reset = true;
        rebuild_gram();
        return report;
      }
      const Eigen::VectorXd slope = subgradient(x_new);
      Cut aggregated{slope, evaluate(x_new) - slope.dot(x_new)};
      cuts_.clear();
      cuts_.push_back(std::move(aggregated));
      if (!same_cut(cuts_.front(), fresh)) cuts_.push_back(std::move(fresh));
      report.reset = true;
      rebuild_gram();
      return report;
    }
  }
  throw std::logic_error("CutSet::update_model: unreachable");
}

}  // namespace bextra
