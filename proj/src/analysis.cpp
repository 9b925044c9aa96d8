#include "sparsehfs/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "sparsehfs/error.hpp"
#include "sparsehfs/rng.hpp"

namespace shfs {

SpectralSummary spectral_summary(const Graph& g, std::size_t dense_cap) {
  const std::size_t n = g.num_nodes();
  if (n < 2) throw ValidationError("spectral_summary needs n >= 2");
  if (n > dense_cap) {
    throw ValidationError("spectral_summary limited to n <= " +
                          std::to_string(dense_cap));
  }
  if (!is_connected(g)) {
    throw DisconnectedGraphError("spectral_summary: lambda_1 = 0 on a "
                                 "disconnected graph");
  }
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(dense_laplacian(g),
                                                 Eigen::EigenvaluesOnly);
  return {eig.eigenvalues()[1], eig.eigenvalues()[static_cast<Eigen::Index>(n - 1)]};
}

SpectralSummary spectral_summary_from_sparsifier(const Graph& h,
                                                 double epsilon,
                                                 std::size_t dense_cap) {
  SpectralSummary s = spectral_summary(h, dense_cap);
  s.lambda_1 /= 1.0 + epsilon;
  s.lambda_n /= 1.0 - epsilon;
  return s;
}

double pi_term(std::size_t l, std::size_t u) {
  if (l < 1 || u < 1) throw ValidationError("pi_term requires l, u >= 1");
  const double ld = static_cast<double>(l);
  const double ud = static_cast<double>(u);
  const double m = static_cast<double>(std::max(l, u));
  return ld * ud / (ld + ud - 0.5) * (1.0 / (1.0 - 1.0 / (2.0 * m)));
}

double stability_denominator(const BoundInputs& in) {
  return static_cast<double>(in.l) * in.gamma * (1.0 - in.epsilon) *
             in.spectra.lambda_1 -
         1.0;
}

namespace {

void check_inputs(const BoundInputs& in) {
  if (in.l < 1 || in.u < 1) throw ValidationError("l and u must be >= 1");
  if (!(in.gamma > 0.0)) throw ValidationError("gamma must be positive");
  if (!(in.epsilon >= 0.0 && in.epsilon < 1.0)) {
    throw ValidationError("epsilon must lie in [0, 1)");
  }
  if (!(in.k >= 0.0) || !(in.c >= 0.0)) {
    throw ValidationError("k and c must be non-negative");
  }
  if (!(in.delta > 0.0 && in.delta <= 1.0)) {
    throw ValidationError("delta must lie in (0, 1]");
  }
  if (!(stability_denominator(in) > 0.0)) {
    throw ValidationError(
        "stability bound inapplicable: l*gamma*(1-eps)*lambda_1 <= 1");
  }
}

}  // namespace

double beta_bound(const BoundInputs& in) {
  check_inputs(in);
  const double d = stability_denominator(in);
  return 1.5 * in.k * std::sqrt(static_cast<double>(in.l)) / (d * d) +
         std::sqrt(2.0) * in.k / d;
}

double empirical_inflation(const BoundInputs& in) {
  check_inputs(in);
  const double d = stability_denominator(in);
  const double l = static_cast<double>(in.l);
  const double num = l * in.gamma * in.spectra.lambda_n * in.k * in.epsilon;
  return num * num / (d * d * d * d);
}

BoundReport generalization_bound(const BoundInputs& in) {
  BoundReport rep;
  rep.pi = pi_term(in.l, in.u);
  rep.beta = beta_bound(in);
  rep.empirical_inflation = empirical_inflation(in);
  rep.slack = std::sqrt(rep.pi * std::log(1.0 / in.delta) / 2.0);
  const double l = static_cast<double>(in.l);
  const double u = static_cast<double>(in.u);
  rep.total_rhs = in.empirical_rhat + rep.empirical_inflation + rep.beta +
                  (2.0 * rep.beta + in.c * in.c * (l + u) / (l * u)) * rep.slack;
  return rep;
}

double restricted_inverse_norm(const Graph& g, const LabeledProblem& p,
                               std::size_t dense_cap) {
  const std::size_t n = g.num_nodes();
  if (n > dense_cap) throw ValidationError("restricted_inverse_norm: n > cap");
  if (p.n() != n) throw ValidationError("label vector length does not match n");
  DenseMatrix q = p.gamma() * static_cast<double>(p.l()) * dense_laplacian(g);
  q.diagonal() += p.indicator();
  const auto nn = static_cast<Eigen::Index>(n);
  const DenseMatrix proj =
      DenseMatrix::Identity(nn, nn) -
      DenseMatrix::Constant(nn, nn, 1.0 / static_cast<double>(n));
  // Lift the 1 direction far above the spectrum so the minimum eigenvalue
  // is the one of the restriction to F.
  const double lift = q.trace() + 1.0;
  const DenseMatrix restricted =
      proj * q * proj +
      DenseMatrix::Constant(nn, nn, lift / static_cast<double>(n));
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(restricted,
                                                 Eigen::EigenvaluesOnly);
  return 1.0 / eig.eigenvalues().minCoeff();
}

double loss_difference(const Vector& f, const Vector& f_prime,
                       const Vector& truth) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double a = f[i] - truth[i];
    const double b = f_prime[i] - truth[i];
    worst = std::max(worst, std::abs(a * a - b * b));
  }
  return worst;
}

namespace {

LabeledProblem problem_for(const std::vector<NodeId>& set, const Vector& truth,
                           double gamma) {
  std::vector<std::pair<NodeId, double>> labels;
  labels.reserve(set.size());
  for (NodeId i : set) labels.emplace_back(i, truth[i]);
  return LabeledProblem(static_cast<std::size_t>(truth.size()), labels, gamma,
                        truth.cwiseAbs().maxCoeff());
}

void track(ProbeResult& res, const Vector& f, const Vector& fp,
           const Vector& truth) {
  res.beta_hat = std::max(res.beta_hat, loss_difference(f, fp, truth));
  res.max_gap = std::max(res.max_gap, (f - fp).norm());
  res.max_loss = std::max({res.max_loss, (f - truth).cwiseAbs().maxCoeff(),
                           (fp - truth).cwiseAbs().maxCoeff()});
  ++res.pairs;
}

// Calls visit(set) for every size-l subset of [0, n) in lexicographic order.
template <typename Visit>
void for_each_subset(std::size_t n, std::size_t l, Visit&& visit) {
  std::vector<NodeId> set(l);
  std::iota(set.begin(), set.end(), 0);
  while (true) {
    visit(set);
    std::size_t i = l;
    while (i > 0 && set[i - 1] == n - l + i - 1) --i;
    if (i == 0) return;
    ++set[i - 1];
    for (std::size_t j = i; j < l; ++j) set[j] = set[j - 1] + 1;
  }
}

}  // namespace

ProbeResult stability_probe(const Graph& g, const Vector& truth,
                            std::size_t l, double gamma, std::size_t trials,
                            std::uint64_t seed, ProbeMode mode,
                            const HfsOptions& opts) {
  const std::size_t n = g.num_nodes();
  if (static_cast<std::size_t>(truth.size()) != n) {
    throw ValidationError("truth length does not match n");
  }
  if (l < 1 || n < l + 1) {
    throw ValidationError("stability_probe requires 1 <= l < n");
  }
  ProbeResult res;

  if (mode == ProbeMode::kExhaustive) {
    if (n > 12 || l > 3) {
      throw ValidationError("exhaustive probe limited to n <= 12, l <= 3");
    }
    // Cache one solution per labeled set; every swap pairs two cached sets.
    std::vector<std::vector<NodeId>> sets;
    for_each_subset(n, l, [&](const std::vector<NodeId>& s) { sets.push_back(s); });
    std::vector<Vector> sols;
    sols.reserve(sets.size());
    for (const auto& s : sets) {
      sols.push_back(stable_hfs(g, problem_for(s, truth, gamma), opts).f);
    }
    for (std::size_t a = 0; a < sets.size(); ++a) {
      for (std::size_t b = a + 1; b < sets.size(); ++b) {
        std::vector<NodeId> common;
        std::set_intersection(sets[a].begin(), sets[a].end(), sets[b].begin(),
                              sets[b].end(), std::back_inserter(common));
        if (common.size() + 1 != l) continue;
        track(res, sols[a], sols[b], truth);
      }
    }
    return res;
  }

  for (std::size_t t = 0; t < trials; ++t) {
    std::mt19937_64 rng(derive_seed(seed, t));
    std::vector<NodeId> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<NodeId> s(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(l));
    const NodeId leaving = s[std::uniform_int_distribution<std::size_t>(0, l - 1)(rng)];
    const NodeId joining =
        perm[std::uniform_int_distribution<std::size_t>(l, n - 1)(rng)];
    const LabeledProblem p = problem_for(s, truth, gamma);
    const LabeledProblem pp = p.swapped(leaving, joining, truth);
    track(res, stable_hfs(g, p, opts).f, stable_hfs(g, pp, opts).f, truth);
  }
  return res;
}

double empirical_error_gap(const Graph& g, const Graph& h,
                           const LabeledProblem& p, const HfsOptions& opts) {
  if (g.num_nodes() != h.num_nodes()) {
    throw ValidationError("empirical_error_gap: node counts differ");
  }
  const Vector fh = stable_hfs(h, p, opts).f;
  const Vector fg = stable_hfs(g, p, opts).f;
  return empirical_risk(fh, p.y(), p) - empirical_risk(fg, p.y(), p);
}

}  // namespace shfs
