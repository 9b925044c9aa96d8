#include "sparsehfs/io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "sparsehfs/error.hpp"

namespace shfs {
namespace {

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

bool is_skippable(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

std::vector<std::string> split_fields(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

template <typename T>
bool parse_number(const std::string& tok, T& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_real(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

EdgeSource edges_from(std::span<const Edge> edges) {
  return [edges, i = std::size_t{0}]() mutable -> std::optional<Edge> {
    if (i >= edges.size()) return std::nullopt;
    return edges[i++];
  };
}

EdgeStreamReader::EdgeStreamReader(const std::filesystem::path& path)
    : path_(path), in_(open_in(path)) {}

std::optional<Edge> EdgeStreamReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (is_skippable(line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() < 2 || fields.size() > 3) {
      throw ValidationError(where(path_, line_no_) +
                            "expected `u v [w]`, got '" + line + "'");
    }
    Edge e;
    if (!parse_number(fields[0], e.u) || !parse_number(fields[1], e.v)) {
      throw ValidationError(where(path_, line_no_) + "bad node id in '" +
                            line + "'");
    }
    if (fields.size() == 3 &&
        (!parse_number(fields[2], e.weight) || !std::isfinite(e.weight))) {
      throw ValidationError(where(path_, line_no_) + "bad weight in '" +
                            line + "'");
    }
    if (e.u == e.v) {
      throw ValidationError(where(path_, line_no_) + "self-loop at node " +
                            std::to_string(e.u));
    }
    if (!(e.weight > 0.0)) {
      throw ValidationError(where(path_, line_no_) + "non-positive weight");
    }
    node_bound_ = std::max<std::size_t>(node_bound_, std::max(e.u, e.v) + 1);
    return e;
  }
  return std::nullopt;
}

std::size_t edge_stream_node_count(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  while (std::getline(in, line) && is_skippable(line)) {
    for (const std::string& tok : split_fields(line)) {
      std::size_t n = 0;
      if (tok.rfind("n=", 0) == 0 && parse_number(tok.substr(2), n) && n > 0) {
        return n;
      }
    }
  }
  EdgeStreamReader reader(path);
  while (reader.next()) {
  }
  return reader.node_bound();
}

std::vector<Edge> read_edge_stream(const std::filesystem::path& path) {
  EdgeStreamReader reader(path);
  std::vector<Edge> edges;
  while (auto e = reader.next()) edges.push_back(*e);
  return edges;
}

void write_edge_stream(const Graph& g, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "# n=" << g.num_nodes() << " m=" << g.num_edges() << "\n";
  for (const Edge& e : g.edges()) {
    out << e.u << ' ' << e.v << ' ' << format_real(e.weight) << '\n';
  }
}

PointCloud read_point_cloud(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<double> coords;
  std::size_t dim = 0;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_skippable(line)) continue;
    const auto fields = split_fields(line);
    if (dim == 0) dim = fields.size();
    if (fields.size() != dim) {
      throw ValidationError(where(path, line_no) + "expected " +
                            std::to_string(dim) + " coordinates");
    }
    for (const auto& f : fields) {
      double x = 0.0;
      if (!parse_number(f, x) || !std::isfinite(x)) {
        throw ValidationError(where(path, line_no) + "bad coordinate '" + f +
                              "'");
      }
      coords.push_back(x);
    }
  }
  if (dim == 0) throw ValidationError(path.string() + ": no points");
  return PointCloud(dim, std::move(coords));
}

void write_point_cloud(const PointCloud& points,
                       const std::filesystem::path& path) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto p = points.point(i);
    for (std::size_t t = 0; t < p.size(); ++t) {
      if (t > 0) out << ' ';
      out << format_real(p[t]);
    }
    out << '\n';
  }
}

std::vector<std::pair<NodeId, double>> read_labels(
    const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<std::pair<NodeId, double>> labels;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_skippable(line)) continue;
    const auto fields = split_fields(line);
    NodeId id = 0;
    double value = 0.0;
    if (fields.size() != 2 || !parse_number(fields[0], id) ||
        !parse_number(fields[1], value) || !std::isfinite(value)) {
      throw ValidationError(where(path, line_no) + "expected `id value`");
    }
    labels.emplace_back(id, value);
  }
  return labels;
}

void write_labels(std::span<const std::pair<NodeId, double>> labels,
                  const std::filesystem::path& path) {
  auto out = open_out(path);
  for (const auto& [id, value] : labels) {
    out << id << ' ' << format_real(value) << '\n';
  }
}

}  // namespace shfs
