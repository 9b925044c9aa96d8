#pragma once

#include <cstddef>
#include <vector>

#include "sparsehfs/graph.hpp"

namespace shfs {

inline constexpr std::size_t kDefaultDenseCap = 2000;

enum class SolveMode { kIterative, kExactDense };

struct SolveOptions {
  // On ||Mx - b|| / ||b||. Ill-conditioned systems also stop once the
  // normwise backward error ||Mx - b|| / (||M|| ||x|| + ||b||) reaches the
  // rounding floor; the achieved residual is reported either way.
  double rel_tolerance = 1e-10;
  int max_iterations = 20000;
  SolveMode mode = SolveMode::kIterative;
  std::size_t dense_cap = kDefaultDenseCap;
  // When false, more than one singular block (a connected component with no
  // diagonal mass) is an error. When true, every singular block is treated
  // with pseudoinverse semantics.
  bool allow_singular_blocks = false;
};

struct SolveResult {
  Vector x;
  double residual = 0.0;  // relative, against the range-projected rhs
  int iterations = 0;
};

// M = laplacian_scale * L_graph + diag(diagonal), with laplacian_scale >= 0
// and diagonal >= 0. Holds a reference to the graph; the graph must outlive
// the system.
class SddSystem {
 public:
  SddSystem(const Graph& graph, double laplacian_scale, Vector diagonal);
  // Pure Laplacian, M = L.
  explicit SddSystem(const Graph& graph);

  const Graph& graph() const { return *graph_; }
  double laplacian_scale() const { return scale_; }
  const Vector& diagonal() const { return diagonal_; }
  std::size_t size() const { return graph_->num_nodes(); }

  void apply(const Vector& x, Vector& y) const;
  DenseMatrix to_dense() const;

  // Nodes of each block whose restriction of M is singular (its kernel is the
  // block's indicator vector).
  const std::vector<std::vector<NodeId>>& singular_blocks() const {
    return singular_blocks_;
  }
  // Removes the block means of x on every singular block.
  void project_range(Vector& x) const;

 private:
  const Graph* graph_;
  double scale_;
  Vector diagonal_;
  std::vector<std::vector<NodeId>> singular_blocks_;
};

// Solves M x = b. For singular M the rhs is first projected onto range(M)
// and the minimum-norm solution is returned.
// Throws SolveError on non-convergence and DisconnectedGraphError when M has
// several singular blocks and allow_singular_blocks is off.
SolveResult solve(const SddSystem& sys, const Vector& b,
                  const SolveOptions& opts = {});

// L^+ b by dense eigendecomposition; the test oracle for every iterative
// path. Throws DisconnectedGraphError if L has more than one zero eigenvalue.
Vector apply_pseudoinverse_dense(const Graph& g, const Vector& b,
                                 std::size_t dense_cap = kDefaultDenseCap);

// Dense L^+ (same restrictions as apply_pseudoinverse_dense, except that
// allow_disconnected drops the kernel of every component).
DenseMatrix dense_pseudoinverse(const Graph& g,
                                std::size_t dense_cap = kDefaultDenseCap,
                                bool allow_disconnected = false);

}  // namespace shfs
