#include "sparsehfs/hfs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sparsehfs/error.hpp"

namespace shfs {

LabeledProblem::LabeledProblem(
    std::size_t n, std::span<const std::pair<NodeId, double>> labels,
    double gamma, double label_bound)
    : y_(Vector::Zero(static_cast<Eigen::Index>(n))),
      indicator_(Vector::Zero(static_cast<Eigen::Index>(n))),
      gamma_(gamma) {
  if (labels.empty()) throw ValidationError("labeled set S is empty");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ValidationError("gamma must be positive");
  }
  double max_abs = 0.0;
  for (const auto& [id, value] : labels) {
    if (id >= n) {
      throw ValidationError("labeled node " + std::to_string(id) +
                            " out of range (n=" + std::to_string(n) + ")");
    }
    if (indicator_[id] > 0.0) {
      throw ValidationError("node " + std::to_string(id) +
                            " labeled more than once");
    }
    if (!std::isfinite(value)) throw ValidationError("label is not finite");
    indicator_[id] = 1.0;
    y_[id] = value;
    labeled_.push_back(id);
    max_abs = std::max(max_abs, std::abs(value));
  }
  std::sort(labeled_.begin(), labeled_.end());
  label_bound_ = label_bound > 0.0 ? label_bound : max_abs;
  if (max_abs > label_bound_) {
    throw ValidationError("label exceeds the stated bound k");
  }
}

LabeledProblem LabeledProblem::swapped(NodeId leaving, NodeId joining,
                                       const Vector& truth) const {
  if (!is_labeled(leaving) || is_labeled(joining)) {
    throw ValidationError("swap must move a labeled node out and an "
                          "unlabeled node in");
  }
  std::vector<std::pair<NodeId, double>> labels;
  for (NodeId i : labeled_) {
    if (i != leaving) labels.emplace_back(i, y_[i]);
  }
  labels.emplace_back(joining, truth[joining]);
  return LabeledProblem(n(), labels, gamma_,
                        std::max(label_bound_, std::abs(truth[joining])));
}

namespace {

void check_shapes(const Graph& g, const LabeledProblem& p) {
  if (g.num_nodes() != p.n()) {
    throw ValidationError("graph has " + std::to_string(g.num_nodes()) +
                          " nodes but labels cover " + std::to_string(p.n()));
  }
}

SddSystem regularized_system(const Graph& g, const LabeledProblem& p,
                             const HfsOptions& opts) {
  if (!opts.allow_disconnected && !is_connected(g)) {
    throw DisconnectedGraphError("HFS requires a connected graph");
  }
  return SddSystem(g, p.gamma() * static_cast<double>(p.l()), p.indicator());
}

SolveOptions solve_options(const HfsOptions& opts) {
  SolveOptions s = opts.solve;
  s.allow_singular_blocks = opts.allow_disconnected;
  return s;
}

}  // namespace

Vector hfs_unconstrained(const Graph& g, const LabeledProblem& p,
                         const HfsOptions& opts) {
  check_shapes(g, p);
  const SddSystem q = regularized_system(g, p, opts);
  return solve(q, p.y(), solve_options(opts)).x;
}

HfsSolution stable_hfs(const Graph& g, const LabeledProblem& p,
                       const HfsOptions& opts) {
  check_shapes(g, p);
  const SddSystem q = regularized_system(g, p, opts);
  const SolveOptions sopts = solve_options(opts);
  const auto n = static_cast<Eigen::Index>(p.n());

  const Vector qy = solve(q, p.y(), sopts).x;
  const Vector ones = Vector::Ones(n);
  const Vector q1 = solve(q, ones, sopts).x;
  const double denom = q1.sum();
  if (!(denom > 0.0)) {
    throw NumericalError("1^T Q^+ 1 is not positive");
  }

  HfsSolution sol;
  sol.mu = qy.sum() / denom;
  sol.graph_used = GraphUsed::kExact;
  if (opts.stabilizer == StabilizerMode::kLagrangian) {
    sol.f = qy - sol.mu * q1;
    // Components without labels carry the block projection of -mu 1.
    Vector rhs = p.y() - sol.mu * ones;
    q.project_range(rhs);
    Vector r;
    q.apply(sol.f, r);
    const double rn = rhs.norm();
    sol.residual = rn > 0.0 ? (r - rhs).norm() / rn : r.norm();
  } else {
    sol.f = qy - sol.mu * ones;
    Vector r;
    q.apply(qy, r);
    const double yn = p.y().norm();
    sol.residual = yn > 0.0 ? (r - p.y()).norm() / yn : r.norm();
  }
  return sol;
}

SparseHfsResult sparse_hfs(const EdgeSource& stream, std::size_t n,
                           const LabeledProblem& p, const StreamConfig& cfg,
                           const HfsOptions& opts) {
  if (p.n() != n) throw ValidationError("label vector length does not match n");
  SparseHfsResult out{{}, stream_sparsify(stream, n, cfg, &p)};
  out.solution = stable_hfs(out.stream.sparsifier.graph(), p, opts);
  out.solution.graph_used = cfg.resparsify.mode == SamplingMode::kPassthrough
                                ? GraphUsed::kExact
                                : GraphUsed::kSparsified;
  return out;
}

double empirical_risk(const Vector& f, const Vector& truth,
                      const LabeledProblem& p) {
  double total = 0.0;
  for (NodeId i : p.labeled()) {
    const double d = f[i] - truth[i];
    total += d * d;
  }
  return total / static_cast<double>(p.l());
}

RiskReport evaluate_risks(const Vector& f, const Vector& truth,
                          const LabeledProblem& p) {
  if (static_cast<std::size_t>(truth.size()) != p.n() ||
      static_cast<std::size_t>(f.size()) != p.n()) {
    throw ValidationError("evaluate_risks: vector lengths do not match n");
  }
  if (p.u() == 0) throw ValidationError("evaluate_risks: no unlabeled nodes");
  RiskReport rep;
  rep.empirical = empirical_risk(f, truth, p);
  std::size_t correct = 0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (p.is_labeled(static_cast<NodeId>(i))) continue;
    const double d = f[i] - truth[i];
    total += d * d;
    if ((f[i] > 0.0 && truth[i] > 0.0) || (f[i] < 0.0 && truth[i] < 0.0)) {
      ++correct;
    }
  }
  rep.generalization = total / static_cast<double>(p.u());
  rep.accuracy = static_cast<double>(correct) / static_cast<double>(p.u());
  return rep;
}

}  // namespace shfs
