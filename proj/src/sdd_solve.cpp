#include "sparsehfs/sdd_solve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include <Eigen/Eigenvalues>

#include "sparsehfs/error.hpp"

namespace shfs {
namespace {

constexpr double kBackwardErrorFloor = 64.0 * 2.220446049250313e-16;

void check_dense_cap(std::size_t n, std::size_t cap) {
  if (n > cap) {
    throw ValidationError("dense mode limited to n <= " + std::to_string(cap) +
                          " (n=" + std::to_string(n) + ")");
  }
}

double rel_residual(const SddSystem& sys, const Vector& x, const Vector& b,
                    double bnorm) {
  Vector r;
  sys.apply(x, r);
  r -= b;
  return r.norm() / bnorm;
}

}  // namespace

SddSystem::SddSystem(const Graph& graph, double laplacian_scale,
                     Vector diagonal)
    : graph_(&graph), scale_(laplacian_scale), diagonal_(std::move(diagonal)) {
  const std::size_t n = graph.num_nodes();
  if (static_cast<std::size_t>(diagonal_.size()) != n) {
    throw ValidationError("diagonal length " +
                          std::to_string(diagonal_.size()) +
                          " does not match n=" + std::to_string(n));
  }
  if (!(scale_ >= 0.0) || !std::isfinite(scale_)) {
    throw ValidationError("laplacian scale must be non-negative");
  }
  for (Eigen::Index i = 0; i < diagonal_.size(); ++i) {
    if (!(diagonal_[i] >= 0.0) || !std::isfinite(diagonal_[i])) {
      throw ValidationError("diagonal entries must be non-negative");
    }
  }

  // With scale 0 every node is its own block.
  std::size_t count = n;
  std::vector<std::uint32_t> comp(n);
  if (scale_ > 0.0) {
    comp = connected_components(graph, &count);
  } else {
    for (std::size_t i = 0; i < n; ++i) comp[i] = static_cast<std::uint32_t>(i);
  }
  std::vector<double> mass(count, 0.0);
  for (std::size_t i = 0; i < n; ++i) mass[comp[i]] += diagonal_[static_cast<Eigen::Index>(i)];
  std::vector<std::ptrdiff_t> slot(count, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (mass[comp[i]] > 0.0) continue;
    if (slot[comp[i]] < 0) {
      slot[comp[i]] = static_cast<std::ptrdiff_t>(singular_blocks_.size());
      singular_blocks_.emplace_back();
    }
    singular_blocks_[static_cast<std::size_t>(slot[comp[i]])].push_back(
        static_cast<NodeId>(i));
  }
}

SddSystem::SddSystem(const Graph& graph)
    : SddSystem(graph, 1.0,
                Vector::Zero(static_cast<Eigen::Index>(graph.num_nodes()))) {}

void SddSystem::apply(const Vector& x, Vector& y) const {
  apply_laplacian(*graph_, x, y);
  y *= scale_;
  y += diagonal_.cwiseProduct(x);
}

DenseMatrix SddSystem::to_dense() const {
  DenseMatrix m = scale_ * dense_laplacian(*graph_);
  m.diagonal() += diagonal_;
  return m;
}

void SddSystem::project_range(Vector& x) const {
  for (const auto& block : singular_blocks_) {
    double mean = 0.0;
    for (NodeId i : block) mean += x[i];
    mean /= static_cast<double>(block.size());
    for (NodeId i : block) x[i] -= mean;
  }
}

SolveResult solve(const SddSystem& sys, const Vector& b,
                  const SolveOptions& opts) {
  const std::size_t n = sys.size();
  if (static_cast<std::size_t>(b.size()) != n) {
    throw ValidationError("rhs length " + std::to_string(b.size()) +
                          " does not match n=" + std::to_string(n));
  }
  if (!(opts.rel_tolerance > 0.0)) {
    throw ValidationError("rel_tolerance must be positive");
  }
  if (sys.singular_blocks().size() > 1 && !opts.allow_singular_blocks) {
    throw DisconnectedGraphError(
        "system is singular on " + std::to_string(sys.singular_blocks().size()) +
        " blocks (disconnected graph with zero diagonal)");
  }

  Vector rhs = b;
  sys.project_range(rhs);
  const double bnorm = rhs.norm();
  SolveResult result;
  if (bnorm == 0.0) {
    result.x = Vector::Zero(static_cast<Eigen::Index>(n));
    return result;
  }

  if (opts.mode == SolveMode::kExactDense) {
    check_dense_cap(n, opts.dense_cap);
    // Adding the kernel projector makes M positive definite without changing
    // its action on range(M).
    DenseMatrix m = sys.to_dense();
    for (const auto& block : sys.singular_blocks()) {
      const double w = 1.0 / static_cast<double>(block.size());
      for (NodeId i : block) {
        for (NodeId j : block) m(i, j) += w;
      }
    }
    Eigen::LDLT<DenseMatrix> ldlt(m);
    result.x = ldlt.solve(rhs);
    sys.project_range(result.x);
    result.residual = rel_residual(sys, result.x, rhs, bnorm);
    return result;
  }

  // Jacobi-preconditioned CG. The preconditioned residual is projected back
  // onto range(M) so iterates stay orthogonal to the kernel.
  Vector x = Vector::Zero(static_cast<Eigen::Index>(n));
  Vector inv_diag(static_cast<Eigen::Index>(n));
  double m_norm = 0.0;  // Gershgorin bound on ||M||_2
  for (std::size_t i = 0; i < n; ++i) {
    const double deg =
        sys.laplacian_scale() * sys.graph().degree(static_cast<NodeId>(i));
    const double d = deg + sys.diagonal()[static_cast<Eigen::Index>(i)];
    inv_diag[static_cast<Eigen::Index>(i)] = d > 0.0 ? 1.0 / d : 1.0;
    m_norm = std::max(m_norm, d + deg);
  }
  auto converged = [&](double rel) {
    if (rel <= opts.rel_tolerance) return true;
    const double backward = rel * bnorm / (m_norm * x.norm() + bnorm);
    return backward <= kBackwardErrorFloor;
  };
  Vector r = rhs;
  Vector z, p, q;
  int iterations = 0;
  double residual = 1.0;
  // A restart recomputes the true residual; the recursive one drifts.
  for (int restart = 0; restart < 4 && iterations < opts.max_iterations;
       ++restart) {
    z = inv_diag.cwiseProduct(r);
    sys.project_range(z);
    p = z;
    double rz = r.dot(z);
    const double target = 0.5 * opts.rel_tolerance * bnorm;
    while (iterations < opts.max_iterations && r.norm() > target) {
      sys.apply(p, q);
      const double pq = p.dot(q);
      if (!(pq > 0.0)) break;
      const double step = rz / pq;
      x.noalias() += step * p;
      r.noalias() -= step * q;
      z = inv_diag.cwiseProduct(r);
      sys.project_range(z);
      const double rz_next = r.dot(z);
      p = z + (rz_next / rz) * p;
      rz = rz_next;
      ++iterations;
    }
    sys.project_range(x);
    sys.apply(x, r);
    r = rhs - r;
    residual = r.norm() / bnorm;
    if (converged(residual)) break;
  }
  if (!converged(residual)) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "conjugate gradient did not reach tolerance %.3g in %d "
                  "iterations (residual %.3g)",
                  opts.rel_tolerance, iterations, residual);
    throw SolveError(msg,
                     residual);
  }
  result.x = std::move(x);
  result.residual = residual;
  result.iterations = iterations;
  return result;
}

DenseMatrix dense_pseudoinverse(const Graph& g, std::size_t dense_cap,
                                bool allow_disconnected) {
  const std::size_t n = g.num_nodes();
  check_dense_cap(n, dense_cap);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(dense_laplacian(g));
  const Vector& lambda = eig.eigenvalues();
  const double cutoff =
      1e-9 * std::max(1.0, lambda.cwiseAbs().maxCoeff());
  DenseMatrix pinv = DenseMatrix::Zero(static_cast<Eigen::Index>(n),
                                       static_cast<Eigen::Index>(n));
  std::size_t zeros = 0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i] <= cutoff) {
      ++zeros;
      continue;
    }
    const auto v = eig.eigenvectors().col(i);
    pinv.noalias() += (1.0 / lambda[i]) * v * v.transpose();
  }
  if (zeros > 1 && !allow_disconnected) {
    throw DisconnectedGraphError("laplacian has " + std::to_string(zeros) +
                                 " zero eigenvalues; graph is disconnected");
  }
  return pinv;
}

Vector apply_pseudoinverse_dense(const Graph& g, const Vector& b,
                                 std::size_t dense_cap) {
  if (static_cast<std::size_t>(b.size()) != g.num_nodes()) {
    throw ValidationError("rhs length does not match graph");
  }
  return dense_pseudoinverse(g, dense_cap) * b;
}

}  // namespace shfs
