#include "bextra/algorithms.hpp"

#include <cmath>
#include <stdexcept>

#include "bextra/parallel.hpp"

namespace bextra {

const char* algorithm_kind_name(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::extra: return "extra";
    case AlgorithmKind::bundle_extra: return "bundle_extra";
  }
  return "unknown";
}

AlgorithmKind algorithm_kind_from_name(const std::string& name) {
  if (name == "extra") return AlgorithmKind::extra;
  if (name == "bundle_extra") return AlgorithmKind::bundle_extra;
  throw std::invalid_argument("unknown algorithm: " + name);
}

Eigen::VectorXd local_mix_row(const Eigen::MatrixXd& M, const Graph& g, const Eigen::MatrixXd& x,
                              int i) {
  if (i < 0 || i >= g.num_nodes()) throw std::out_of_range("local_mix_row: agent index");
  Eigen::VectorXd acc = M(i, i) * x.row(i).transpose();
  for (int j : g.neighbors(i)) acc.noalias() += M(i, j) * x.row(j).transpose();
  return acc;
}

Eigen::VectorXd extra_agent_primal(int i, const Eigen::MatrixXd& x, const Eigen::MatrixXd& q,
                                   const Eigen::MatrixXd& Wt, const Graph& g, double alpha,
                                   const Problem& p) {
  const Eigen::VectorXd xi = x.row(i).transpose();
  return local_mix_row(Wt, g, x, i) -
         alpha * (p.oracles[static_cast<size_t>(i)].gradient(xi) + q.row(i).transpose());
}

Eigen::VectorXd agent_dual_update(int i, const Eigen::MatrixXd& x_new, const Eigen::MatrixXd& q,
                                  const Eigen::MatrixXd& Wt, const Graph& g, double alpha) {
  return q.row(i).transpose() +
         (x_new.row(i).transpose() - local_mix_row(Wt, g, x_new, i)) / alpha;
}

ProxPWLInstance instance_from_model(const CutSet& model, const Eigen::VectorXd& c, double alpha) {
  const auto& cuts = model.cuts();
  if (cuts.empty()) throw std::logic_error("instance_from_model: model has no cuts");
  const Eigen::Index d = c.size();
  const Eigen::Index rows =
      static_cast<Eigen::Index>(cuts.size()) + (model.floor().has_value() ? 1 : 0);
  ProxPWLInstance inst;
  inst.A.resize(rows, d);
  inst.b.resize(rows);
  for (size_t j = 0; j < cuts.size(); ++j) {
    inst.A.row(static_cast<Eigen::Index>(j)) = cuts[j].a.transpose();
    inst.b[static_cast<Eigen::Index>(j)] = cuts[j].b;
  }
  if (model.floor()) {
    inst.A.row(rows - 1).setZero();
    inst.b[rows - 1] = *model.floor();
  }
  inst.c = c;
  inst.alpha = alpha;
  return inst;
}

std::optional<Eigen::VectorXd> realign_warm_start(const Eigen::VectorXd& old_warm, bool has_floor,
                                                  const ModelUpdate& delta, int new_cut_count) {
  if (delta.reset) return std::nullopt;
  const Eigen::Index floor_rows = has_floor ? 1 : 0;
  if (old_warm.size() < floor_rows) return std::nullopt;
  std::vector<double> lam(old_warm.data(), old_warm.data() + (old_warm.size() - floor_rows));
  if (delta.appended) lam.push_back(0.0);  // new cut enters with no mass
  if (delta.evicted_front > static_cast<int>(lam.size())) return std::nullopt;
  lam.erase(lam.begin(), lam.begin() + delta.evicted_front);
  if (static_cast<int>(lam.size()) != new_cut_count) return std::nullopt;
  Eigen::VectorXd out(static_cast<Eigen::Index>(lam.size()) + floor_rows);
  for (size_t j = 0; j < lam.size(); ++j) out[static_cast<Eigen::Index>(j)] = lam[j];
  if (has_floor) out[out.size() - 1] = old_warm[old_warm.size() - 1];
  return out;
}

BundleAgentResult bundle_agent_primal(int i, const Eigen::MatrixXd& x, const Eigen::MatrixXd& q,
                                      const Eigen::MatrixXd& Wt, const Graph& g, double alpha,
                                      const Problem& p, CutSet& model,
                                      const Eigen::VectorXd* warm_start, double inner_tol,
                                      int inner_max_iters) {
  const ObjectiveOracle& oracle = p.oracles[static_cast<size_t>(i)];
  const Eigen::VectorXd xi = x.row(i).transpose();
  const ModelUpdate delta = model.update_model(xi, oracle.value(xi), oracle.gradient(xi));

  std::optional<Eigen::VectorXd> warm;
  if (warm_start != nullptr && warm_start->size() > 0)
    warm = realign_warm_start(*warm_start, model.floor().has_value(), delta,
                              static_cast<int>(model.cuts().size()));

  const Eigen::VectorXd c = local_mix_row(Wt, g, x, i) - alpha * q.row(i).transpose();
  const ProxPWLInstance inst = instance_from_model(model, c, alpha);
  // The model keeps its slope Gram matrix current; a floor contributes one
  // zero slope row, so its Gram border is zero.
  Eigen::MatrixXd padded;
  const Eigen::MatrixXd* gram = &model.slope_gram();
  if (model.floor()) {
    const Eigen::Index mc = model.slope_gram().rows();
    padded = Eigen::MatrixXd::Zero(mc + 1, mc + 1);
    padded.topLeftCorner(mc, mc) = model.slope_gram();
    gram = &padded;
  }
  const ProxPWLSolution sol =
      solve_prox_pwl(inst, inner_tol, inner_max_iters, warm ? &*warm : nullptr, gram);

  BundleAgentResult res;
  res.x_new = sol.x;
  res.lambda = sol.lambda;
  res.inner_iters = sol.inner_iters;
  res.warning = sol.status == SolveStatus::iteration_limit;
  return res;
}

namespace {

void check_step_inputs(const Eigen::MatrixXd& x, const Graph& g, double alpha, const Problem& p) {
  if (x.rows() != g.num_nodes()) throw std::invalid_argument("step: x row count != agent count");
  if (p.n != g.num_nodes()) throw std::invalid_argument("step: problem size != agent count");
  if (!(alpha > 0.0)) throw std::invalid_argument("step: alpha must be positive");
}

Eigen::MatrixXd initial_dual(const Eigen::MatrixXd& x0, const Eigen::MatrixXd& Wt, const Graph& g,
                             double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("init: alpha must be positive");
  Eigen::MatrixXd q(x0.rows(), x0.cols());
  for (int i = 0; i < static_cast<int>(x0.rows()); ++i)
    q.row(i) = (x0.row(i).transpose() - local_mix_row(Wt, g, x0, i)).transpose() / alpha;
  return q;
}

}  // namespace

ExtraPrimalDualState init_extra_primal_dual(const Eigen::MatrixXd& x0, const Eigen::MatrixXd& Wt,
                                            const Graph& g, double alpha) {
  ExtraPrimalDualState s;
  s.x = x0;
  s.q = initial_dual(x0, Wt, g, alpha);
  s.k = 0;
  return s;
}

void extra_primal_dual_step(ExtraPrimalDualState& state, const MixingPair& mix, const Graph& g,
                            double alpha, const Problem& p, int threads) {
  check_step_inputs(state.x, g, alpha, p);
  const int n = g.num_nodes();
  Eigen::MatrixXd x_new(state.x.rows(), state.x.cols());
  parallel_for(n, threads, [&](int i) {
    x_new.row(i) = extra_agent_primal(i, state.x, state.q, mix.Wt, g, alpha, p).transpose();
  });
  parallel_for(n, threads, [&](int i) {
    state.q.row(i) = agent_dual_update(i, x_new, state.q, mix.Wt, g, alpha).transpose();
  });
  state.x.swap(x_new);
  ++state.k;
}

ExtraRecursionState init_extra_recursion(const Eigen::MatrixXd& x0) {
  ExtraRecursionState s;
  s.x = x0;
  s.k = 0;
  return s;
}

void extra_recursion_step(ExtraRecursionState& state, const MixingPair& mix, const Graph& g,
                          double alpha, const Problem& p, int threads) {
  check_step_inputs(state.x, g, alpha, p);
  const int n = g.num_nodes();
  Eigen::MatrixXd grads(state.x.rows(), state.x.cols());
  parallel_for(n, threads, [&](int i) {
    grads.row(i) =
        p.oracles[static_cast<size_t>(i)].gradient(state.x.row(i).transpose()).transpose();
  });
  Eigen::MatrixXd x_new(state.x.rows(), state.x.cols());
  if (state.k == 0) {
    parallel_for(n, threads, [&](int i) {
      x_new.row(i) =
          (local_mix_row(mix.W, g, state.x, i) - alpha * grads.row(i).transpose()).transpose();
    });
  } else {
    parallel_for(n, threads, [&](int i) {
      x_new.row(i) = (2.0 * local_mix_row(mix.Wt, g, state.x, i) -
                      local_mix_row(mix.Wt, g, state.prev_x, i) -
                      alpha * (grads.row(i) - state.prev_grad.row(i)).transpose())
                         .transpose();
    });
  }
  state.prev_x = std::move(state.x);
  state.prev_grad = std::move(grads);
  state.x = std::move(x_new);
  ++state.k;
}

BundleExtraState init_bundle_extra(const Eigen::MatrixXd& x0, const Eigen::MatrixXd& Wt,
                                   const Graph& g, double alpha, ModelKind model, int window,
                                   const Problem& p) {
  BundleExtraState s;
  s.x = x0;
  s.q = initial_dual(x0, Wt, g, alpha);
  s.k = 0;
  s.models.reserve(static_cast<size_t>(g.num_nodes()));
  const bool with_floor = model == ModelKind::polyak || model == ModelKind::polyak_cutting_plane;
  for (int i = 0; i < g.num_nodes(); ++i) {
    std::optional<double> floor;
    if (with_floor) floor = p.oracles[static_cast<size_t>(i)].lower_bound;
    s.models.emplace_back(model, window, floor);
  }
  s.warm.resize(static_cast<size_t>(g.num_nodes()));
  return s;
}

void bundle_extra_step(BundleExtraState& state, const MixingPair& mix, const Graph& g,
                       double alpha, const Problem& p, double inner_tol, int inner_max_iters,
                       int threads) {
  check_step_inputs(state.x, g, alpha, p);
  const int n = g.num_nodes();
  Eigen::MatrixXd x_new(state.x.rows(), state.x.cols());
  std::vector<int> iters(static_cast<size_t>(n), 0);
  std::vector<char> warned(static_cast<size_t>(n), 0);
  parallel_for(n, threads, [&](int i) {
    const size_t ui = static_cast<size_t>(i);
    const Eigen::VectorXd* warm = state.warm[ui].size() > 0 ? &state.warm[ui] : nullptr;
    BundleAgentResult res = bundle_agent_primal(i, state.x, state.q, mix.Wt, g, alpha, p,
                                                state.models[ui], warm, inner_tol,
                                                inner_max_iters);
    x_new.row(i) = res.x_new.transpose();
    state.warm[ui] = std::move(res.lambda);
    iters[ui] = res.inner_iters;
    warned[ui] = res.warning ? 1 : 0;
  });
  parallel_for(n, threads, [&](int i) {
    state.q.row(i) = agent_dual_update(i, x_new, state.q, mix.Wt, g, alpha).transpose();
  });
  state.x.swap(x_new);
  ++state.k;
  for (int i = 0; i < n; ++i) {
    state.inner_iters_total += iters[static_cast<size_t>(i)];
    state.inner_warnings += warned[static_cast<size_t>(i)];
  }
}

RunResult run(const RunConfig& config) {
  if (config.graph == nullptr || config.mixing == nullptr || config.problem == nullptr)
    throw std::invalid_argument("run: graph, mixing, and problem must all be set");
  if (!(config.alpha > 0.0)) throw std::invalid_argument("run: alpha must be positive");
  if (config.max_iters < 0) throw std::invalid_argument("run: max_iters must be nonnegative");
  if (config.threads < 1) throw std::invalid_argument("run: threads must be at least 1");
  const Graph& g = *config.graph;
  const MixingPair& mix = *config.mixing;
  const Problem& p = *config.problem;
  const int n = g.num_nodes();
  const int d = p.dim();
  if (p.n != n) throw std::invalid_argument("run: problem size != agent count");

  Eigen::MatrixXd x0 = config.x0;
  if (x0.size() == 0) x0 = Eigen::MatrixXd::Zero(n, d);
  if (x0.rows() != n || x0.cols() != d)
    throw std::invalid_argument("run: x0 must be agents x dimension");

  Eigen::VectorXd x_star;
  if (p.reference_optimum)
    x_star = *p.reference_optimum;
  else if (p.least_squares)
    x_star = global_optimum_least_squares(p);
  else
    throw std::invalid_argument("run: problem carries no reference optimum for metrics");

  const Eigen::MatrixXd q0 = initial_dual(x0, mix.Wt, g, config.alpha);
  MetricsContext ctx(p, mix.Wt, x_star, x0, q0, config.alpha);

  RunResult result;
  result.theorem_bound = ctx.bound();
  result.trajectory.reserve(static_cast<size_t>(config.max_iters) + 1);
  const double blowup = 1e12 * std::max(1.0, x0.norm());

  auto record_and_check = [&](int k, const Eigen::MatrixXd& x, const Eigen::MatrixXd& q,
                              long long inner_total) {
    if (!x.allFinite() || !q.allFinite()) {
      result.diverged = true;
      return false;
    }
    const IterationMetrics& m = result.trajectory.emplace_back(ctx.record(k, x, q, inner_total));
    if (x.norm() > blowup) {
      result.diverged = true;
      return false;
    }
    if (config.stop_rel_error > 0.0 && m.rel_error <= config.stop_rel_error) return false;
    return true;
  };

  if (config.algorithm == AlgorithmKind::extra) {
    ExtraPrimalDualState s = init_extra_primal_dual(x0, mix.Wt, g, config.alpha);
    bool keep_going = record_and_check(0, s.x, s.q, 0);
    for (int k = 1; keep_going && k <= config.max_iters; ++k) {
      extra_primal_dual_step(s, mix, g, config.alpha, p, config.threads);
      keep_going = record_and_check(k, s.x, s.q, 0);
    }
    result.x_final = std::move(s.x);
    result.q_final = std::move(s.q);
  } else {
    BundleExtraState s =
        init_bundle_extra(x0, mix.Wt, g, config.alpha, config.model, config.window, p);
    bool keep_going = record_and_check(0, s.x, s.q, 0);
    for (int k = 1; keep_going && k <= config.max_iters; ++k) {
      bundle_extra_step(s, mix, g, config.alpha, p, config.inner_tol, config.inner_max_iters,
                        config.threads);
      keep_going = record_and_check(k, s.x, s.q, s.inner_iters_total);
    }
    result.x_final = std::move(s.x);
    result.q_final = std::move(s.q);
    result.inner_warnings = s.inner_warnings;
  }
  return result;
}

}  // namespace bextra
