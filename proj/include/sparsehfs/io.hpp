#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sparsehfs/graph.hpp"

namespace shfs {

// Pull-style edge source; returns std::nullopt at end of stream.
using EdgeSource = std::function<std::optional<Edge>()>;

EdgeSource edges_from(std::span<const Edge> edges);

// Reads `u v [w]` lines lazily in file order. Blank lines and lines starting
// with '#' are skipped. Malformed lines and self-loops throw ValidationError
// naming the line number.
class EdgeStreamReader {
 public:
  explicit EdgeStreamReader(const std::filesystem::path& path);

  std::optional<Edge> next();
  std::size_t line_number() const { return line_no_; }
  // Largest node id seen so far, plus one.
  std::size_t node_bound() const { return node_bound_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
  std::size_t node_bound_ = 0;
};

std::vector<Edge> read_edge_stream(const std::filesystem::path& path);

// Node count from a leading `# n=<count>` comment, else the largest id seen
// plus one (one streaming pass, nothing retained).
std::size_t edge_stream_node_count(const std::filesystem::path& path);
void write_edge_stream(const Graph& g, const std::filesystem::path& path);

// One point per line, whitespace-separated reals.
PointCloud read_point_cloud(const std::filesystem::path& path);
void write_point_cloud(const PointCloud& points,
                       const std::filesystem::path& path);

// Lines `id value`.
std::vector<std::pair<NodeId, double>> read_labels(
    const std::filesystem::path& path);
void write_labels(std::span<const std::pair<NodeId, double>> labels,
                  const std::filesystem::path& path);

// Formats a double so that parsing it back yields the same value.
std::string format_real(double x);

}  // namespace shfs
