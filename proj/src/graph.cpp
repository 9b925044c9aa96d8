#include "sparsehfs/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

#include "sparsehfs/error.hpp"

namespace shfs {

Vector EdgeVector::to_dense(std::size_t n) const {
  Vector b = Vector::Zero(static_cast<Eigen::Index>(n));
  b[u] = 1.0;
  b[v] = -1.0;
  return b;
}

Graph::Graph(std::size_t n) : n_(n) { finalize(); }

double Graph::total_weight() const {
  double total = 0.0;
  for (const Edge& e : edges_) total += e.weight;
  return total;
}

std::ptrdiff_t Graph::find_edge(NodeId u, NodeId v) const {
  if (u > v) std::swap(u, v);
  auto it = std::lower_bound(
      edges_.begin(), edges_.end(), std::pair{u, v},
      [](const Edge& e, const std::pair<NodeId, NodeId>& key) {
        return std::pair{e.u, e.v} < key;
      });
  if (it == edges_.end() || it->u != u || it->v != v) return -1;
  return it - edges_.begin();
}

double Graph::weight(NodeId u, NodeId v) const {
  const std::ptrdiff_t idx = find_edge(u, v);
  return idx < 0 ? 0.0 : edges_[static_cast<std::size_t>(idx)].weight;
}

Graph Graph::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw ValidationError("graph scale factor must be positive");
  }
  Graph out = *this;
  for (Edge& e : out.edges_) e.weight *= factor;
  out.finalize();
  return out;
}

void Graph::finalize() {
  degrees_ = Vector::Zero(static_cast<Eigen::Index>(n_));
  offsets_.assign(n_ + 1, 0);
  for (const Edge& e : edges_) {
    degrees_[e.u] += e.weight;
    degrees_[e.v] += e.weight;
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  neighbors_.resize(2 * edges_.size());
  neighbor_weights_.resize(2 * edges_.size());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const Edge& e : edges_) {
    neighbors_[cursor[e.u]] = e.v;
    neighbor_weights_[cursor[e.u]++] = e.weight;
    neighbors_[cursor[e.v]] = e.u;
    neighbor_weights_[cursor[e.v]++] = e.weight;
  }
}

Graph build_graph(std::span<const Edge> edges, std::size_t n) {
  std::vector<Edge> canon;
  canon.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.u >= n || e.v >= n) {
      throw ValidationError("edge (" + std::to_string(e.u) + "," +
                            std::to_string(e.v) + ") has endpoint >= n=" +
                            std::to_string(n));
    }
    if (e.u == e.v) {
      throw ValidationError("self-loop at node " + std::to_string(e.u));
    }
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw ValidationError("edge (" + std::to_string(e.u) + "," +
                            std::to_string(e.v) +
                            ") has non-positive weight");
    }
    canon.push_back(e.canonical());
  }
  std::stable_sort(canon.begin(), canon.end(), [](const Edge& a, const Edge& b) {
    return std::pair{a.u, a.v} < std::pair{b.u, b.v};
  });

  Graph g;
  g.n_ = n;
  g.edges_.reserve(canon.size());
  for (const Edge& e : canon) {
    if (!g.edges_.empty() && g.edges_.back().u == e.u &&
        g.edges_.back().v == e.v) {
      g.edges_.back().weight += e.weight;
    } else {
      g.edges_.push_back(e);
    }
  }
  g.finalize();
  return g;
}

SparseMatrix laplacian(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(4 * g.num_edges());
  for (const Edge& e : g.edges()) {
    triplets.emplace_back(e.u, e.u, e.weight);
    triplets.emplace_back(e.v, e.v, e.weight);
    triplets.emplace_back(e.u, e.v, -e.weight);
    triplets.emplace_back(e.v, e.u, -e.weight);
  }
  SparseMatrix L(n, n);
  L.setFromTriplets(triplets.begin(), triplets.end());
  return L;
}

DenseMatrix dense_laplacian(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  DenseMatrix L = DenseMatrix::Zero(n, n);
  for (const Edge& e : g.edges()) {
    L(e.u, e.u) += e.weight;
    L(e.v, e.v) += e.weight;
    L(e.u, e.v) -= e.weight;
    L(e.v, e.u) -= e.weight;
  }
  return L;
}

void apply_laplacian(const Graph& g, const Vector& x, Vector& y) {
  const std::size_t n = g.num_nodes();
  y.resize(static_cast<Eigen::Index>(n));
  const auto off = g.adj_offset();
  const auto idx = g.adj_index();
  const auto w = g.adj_weight();
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t p = off[i]; p < off[i + 1]; ++p) acc += w[p] * x[idx[p]];
    y[static_cast<Eigen::Index>(i)] =
        g.degree(static_cast<NodeId>(i)) * x[static_cast<Eigen::Index>(i)] -
        acc;
  }
}

double quadratic_form(const Graph& g, const Vector& x) {
  double total = 0.0;
  for (const Edge& e : g.edges()) {
    const double d = x[e.u] - x[e.v];
    total += e.weight * d * d;
  }
  return total;
}

Graph add_graphs(const Graph& g, const Graph& a) {
  if (g.num_nodes() != a.num_nodes()) {
    throw ValidationError("add_graphs: node counts differ (" +
                          std::to_string(g.num_nodes()) + " vs " +
                          std::to_string(a.num_nodes()) + ")");
  }
  std::vector<Edge> all(g.edges().begin(), g.edges().end());
  all.insert(all.end(), a.edges().begin(), a.edges().end());
  return build_graph(all, g.num_nodes());
}

std::vector<std::uint32_t> connected_components(const Graph& g,
                                                std::size_t* count) {
  constexpr auto kUnset = static_cast<std::uint32_t>(-1);
  const std::size_t n = g.num_nodes();
  std::vector<std::uint32_t> comp(n, kUnset);
  const auto off = g.adj_offset();
  const auto idx = g.adj_index();
  std::uint32_t next = 0;
  std::vector<NodeId> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] != kUnset) continue;
    comp[s] = next;
    stack.push_back(static_cast<NodeId>(s));
    while (!stack.empty()) {
      const NodeId i = stack.back();
      stack.pop_back();
      for (std::size_t p = off[i]; p < off[i + 1]; ++p) {
        if (comp[idx[p]] == kUnset) {
          comp[idx[p]] = next;
          stack.push_back(idx[p]);
        }
      }
    }
    ++next;
  }
  if (count != nullptr) *count = next;
  return comp;
}

std::size_t num_components(const Graph& g) {
  std::size_t count = 0;
  connected_components(g, &count);
  return count;
}

bool is_connected(const Graph& g) { return num_components(g) <= 1; }

PointCloud::PointCloud(std::size_t dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0) throw ValidationError("point dimension must be positive");
  if (coords_.size() % dim_ != 0) {
    throw ValidationError("coordinate count is not a multiple of dimension");
  }
  if (size() < 2) throw ValidationError("point cloud needs at least 2 points");
}

Graph knn_graph(const PointCloud& points, std::size_t k,
                KnnSymmetrization mode) {
  const std::size_t n = points.size();
  if (k < 1 || k >= n) {
    throw ValidationError("knn_graph requires 1 <= k < n (k=" +
                          std::to_string(k) + ", n=" + std::to_string(n) +
                          ")");
  }
  const std::size_t d = points.dim();
  // selected[i] holds the k nearest neighbours of i, sorted by index.
  std::vector<std::vector<NodeId>> selected(n);
  std::vector<std::pair<double, NodeId>> cand(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto pi = points.point(i);
    std::size_t c = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto pj = points.point(j);
      double dist2 = 0.0;
      for (std::size_t t = 0; t < d; ++t) {
        const double diff = pi[t] - pj[t];
        dist2 += diff * diff;
      }
      cand[c++] = {dist2, static_cast<NodeId>(j)};
    }
    std::nth_element(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k - 1),
                     cand.end());
    // Pairs compare by (distance, index), so the k-th element is already
    // tie-broken towards lower indices.
    auto& sel = selected[i];
    sel.reserve(k);
    for (std::size_t t = 0; t < k; ++t) sel.push_back(cand[t].second);
    std::sort(sel.begin(), sel.end());
  }

  std::vector<Edge> edges;
  edges.reserve(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    for (NodeId j : selected[i]) {
      const bool reciprocal =
          std::binary_search(selected[j].begin(), selected[j].end(),
                             static_cast<NodeId>(i));
      if (reciprocal) {
        // Emit a reciprocal pair once, from its lower endpoint.
        if (i < j) edges.push_back({static_cast<NodeId>(i), j, 1.0});
      } else if (mode == KnnSymmetrization::kUnion) {
        edges.push_back({static_cast<NodeId>(i), j, 1.0});
      }
    }
  }
  return build_graph(edges, n);
}

}  // namespace shfs
