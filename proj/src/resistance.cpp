#include "sparsehfs/resistance.hpp"

#include <cmath>
#include <string>

#include "sparsehfs/error.hpp"
#include "sparsehfs/rng.hpp"

namespace shfs {

std::size_t sketch_dimension(std::size_t n, double alpha, double constant) {
  const double logn = std::log(static_cast<double>(std::max<std::size_t>(n, 2)));
  const double rows = std::ceil(constant * logn / ((alpha - 1.0) * (alpha - 1.0)));
  return static_cast<std::size_t>(std::max(1.0, rows));
}

ResistanceEstimate exact_resistances(const Graph& g, std::size_t dense_cap,
                                     bool allow_disconnected) {
  const DenseMatrix pinv = dense_pseudoinverse(g, dense_cap, allow_disconnected);
  ResistanceEstimate est;
  est.values.reserve(g.num_edges());
  for (const Edge& e : g.edges()) {
    est.values.push_back(pinv(e.u, e.u) + pinv(e.v, e.v) - 2.0 * pinv(e.u, e.v));
  }
  return est;
}

ResistanceEstimate sketch_resistances(const Graph& g, double alpha,
                                      std::uint64_t seed,
                                      const SketchOptions& opts) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw ValidationError("sketch_resistances requires alpha > 1");
  }
  if (!opts.allow_disconnected && !is_connected(g)) {
    throw DisconnectedGraphError("sketch_resistances: graph is disconnected");
  }
  const std::size_t n = g.num_nodes();
  const std::size_t rows = sketch_dimension(n, alpha, opts.constant);
  const double scale = 1.0 / std::sqrt(static_cast<double>(rows));

  std::vector<double> sqrt_w;
  sqrt_w.reserve(g.num_edges());
  for (const Edge& e : g.edges()) sqrt_w.push_back(std::sqrt(e.weight));

  SddSystem lap(g);
  SolveOptions solve_opts = opts.solve;
  solve_opts.allow_singular_blocks = true;

  ResistanceEstimate est;
  est.alpha = alpha;
  est.mode = ResistanceMode::kSketched;
  est.values.assign(g.num_edges(), 0.0);
  Vector rhs(static_cast<Eigen::Index>(n));
  for (std::size_t row = 0; row < rows; ++row) {
    SplitMix64 rng(derive_seed(seed, row));
    rhs.setZero();
    const auto edges = g.edges();
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const double s = (rng() >> 63) ? scale : -scale;
      const double c = s * sqrt_w[i];
      rhs[edges[i].u] += c;
      rhs[edges[i].v] -= c;
    }
    const Vector z = solve(lap, rhs, solve_opts).x;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const double d = z[edges[i].u] - z[edges[i].v];
      est.values[i] += d * d;
    }
  }
  return est;
}

double foster_sum(const Graph& g, const ResistanceEstimate& r) {
  if (r.values.size() != g.num_edges()) {
    throw ValidationError("resistance estimate does not cover the graph");
  }
  double total = 0.0;
  const auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) total += edges[i].weight * r.values[i];
  return total;
}

}  // namespace shfs
