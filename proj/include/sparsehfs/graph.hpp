#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace shfs {

using NodeId = std::uint32_t;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

// Undirected weighted edge. Graphs store edges canonically with u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double weight = 1.0;

  Edge canonical() const { return u < v ? *this : Edge{v, u, weight}; }
  friend bool operator==(const Edge&, const Edge&) = default;
};

// b_e = chi_u - chi_v.
struct EdgeVector {
  NodeId u = 0;
  NodeId v = 0;

  double dot(const Vector& x) const { return x[u] - x[v]; }
  Vector to_dense(std::size_t n) const;
};

// Weighted undirected graph over nodes [0, n). Immutable after construction;
// parallel edges are collapsed by summing their weights.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n);

  std::size_t num_nodes() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }

  double degree(NodeId i) const { return degrees_[i]; }
  const Vector& degrees() const { return degrees_; }
  double total_weight() const;

  // Index into edges() of (u, v), or -1 when absent.
  std::ptrdiff_t find_edge(NodeId u, NodeId v) const;
  double weight(NodeId u, NodeId v) const;

  // CSR adjacency: neighbours of i are adj_index()[adj_offset()[i] ..
  // adj_offset()[i+1]).
  std::span<const std::size_t> adj_offset() const { return offsets_; }
  std::span<const NodeId> adj_index() const { return neighbors_; }
  std::span<const double> adj_weight() const { return neighbor_weights_; }

  Graph scaled(double factor) const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  friend Graph build_graph(std::span<const Edge> edges, std::size_t n);
  void finalize();

  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  Vector degrees_;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> neighbors_;
  std::vector<double> neighbor_weights_;
};

// Validates and canonicalizes an edge list. Throws ValidationError on
// self-loops, non-positive or non-finite weights and out-of-range endpoints.
Graph build_graph(std::span<const Edge> edges, std::size_t n);

SparseMatrix laplacian(const Graph& g);
DenseMatrix dense_laplacian(const Graph& g);

// y = L x without materializing L.
void apply_laplacian(const Graph& g, const Vector& x, Vector& y);

// sum_e a_e (x_u - x_v)^2
double quadratic_form(const Graph& g, const Vector& x);

Graph add_graphs(const Graph& g, const Graph& a);

// Component id per node, numbered 0.. in order of first appearance.
std::vector<std::uint32_t> connected_components(const Graph& g,
                                                std::size_t* count = nullptr);
std::size_t num_components(const Graph& g);
bool is_connected(const Graph& g);

// Row-major point set of fixed dimension.
class PointCloud {
 public:
  PointCloud(std::size_t dim, std::vector<double> coords);

  std::size_t size() const { return coords_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  const std::vector<double>& coords() const { return coords_; }

 private:
  std::size_t dim_;
  std::vector<double> coords_;
};

enum class KnnSymmetrization { kUnion, kMutual };

// Exact k-nearest-neighbour graph with unit weights. Ties at equal distance
// go to the lower node index.
Graph knn_graph(const PointCloud& points, std::size_t k,
                KnnSymmetrization mode = KnnSymmetrization::kUnion);

}  // namespace shfs
