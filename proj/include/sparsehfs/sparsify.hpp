#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "sparsehfs/graph.hpp"
#include "sparsehfs/io.hpp"
#include "sparsehfs/problem.hpp"
#include "sparsehfs/resistance.hpp"

namespace shfs {

// One sampled edge of a sparsifier. Parallel entries for the same (u, v)
// arise when an edge reappears in a later batch; they are sampled
// independently and summed in Sparsifier::graph().
struct SparsifierEntry {
  NodeId u = 0;
  NodeId v = 0;
  double weight = 0.0;       // current weight in H: multiplicity * a / (N p)
  double prob = 1.0;         // retained sampling probability, in (0, 1]
  double base_weight = 0.0;  // original stream weight a_e
  std::int64_t multiplicity = 1;
};

// Natural log unless overridden; only scales the batch and copy-count
// constants.
struct LogBase {
  double base = 0.0;  // <= 0 selects the natural logarithm
  double operator()(double x) const;
};

// N = ceil(alpha^2 n log^2(n) / eps^2), alpha = 1/(1-eps).
std::int64_t copy_count(std::size_t n, double epsilon, LogBase log = {});
// ceil(n log^2(n) / eps^2)
std::size_t default_batch_size(std::size_t n, double epsilon,
                               LogBase log = {});

class Sparsifier {
 public:
  Sparsifier(std::size_t n, double epsilon, LogBase log = {});
  Sparsifier(std::size_t n, double epsilon, std::int64_t copy_count,
             std::size_t round, std::vector<SparsifierEntry> entries);

  std::size_t n() const { return n_; }
  double epsilon() const { return epsilon_; }
  double alpha() const { return 1.0 / (1.0 - epsilon_); }
  std::int64_t copy_count() const { return copy_count_; }
  std::size_t round() const { return round_; }
  const std::vector<SparsifierEntry>& entries() const { return entries_; }
  // H with parallel entries collapsed.
  const Graph& graph() const { return graph_; }

 private:
  std::size_t n_;
  double epsilon_;
  std::int64_t copy_count_;
  std::size_t round_ = 0;
  std::vector<SparsifierEntry> entries_;
  Graph graph_;
};

enum class SamplingMode {
  kSample,
  // Keeps every edge with its weight (H = H + A); the degenerate exact case.
  kPassthrough,
};

struct ResparsifyOptions {
  SamplingMode mode = SamplingMode::kSample;
  ResistanceMode resistance = ResistanceMode::kSketched;
  SketchOptions sketch{};
  // Resistances per component when H + A is disconnected.
  bool allow_disconnected = false;
};

// One resparsification round: estimate resistances on H + A with
// alpha = 1/(1-eps), thin the stored copies of retained edges, and draw
// Binomial(N, p) copies of every batch edge.
Sparsifier resparsify(const Sparsifier& s, const Graph& batch,
                      std::uint64_t seed, const ResparsifyOptions& opts = {});

struct StreamConfig {
  double epsilon = 0.5;
  std::size_t batch_size = 0;  // 0 selects default_batch_size
  std::uint64_t seed = 0;
  bool recompute_each_batch = false;
  LogBase log{};
  ResparsifyOptions resparsify{};
};

struct RoundStats {
  std::size_t round = 0;
  std::size_t batch_edges = 0;      // unique edges in A
  std::size_t h_entries_before = 0;
  std::size_t h_entries_after = 0;
  std::size_t peak_retained = 0;    // |H| + |A| while the round runs
  std::size_t h_edges = 0;          // unique edges of H after the round
};

struct StreamResult {
  Sparsifier sparsifier;
  std::vector<RoundStats> rounds;
  std::vector<HfsSolution> trace;  // one per round when recomputing
  std::size_t batch_size = 0;
  std::size_t edges_received = 0;
  std::size_t peak_retained = 0;
};

// Batches the stream into A (duplicates merged by weight addition) and
// resparsifies after every full batch and once for a trailing partial batch.
// Intermediate graphs may be disconnected; a round that leaves H with more
// components than H + A throws DisconnectedGraphError naming the batch.
// With labels and recompute_each_batch set, stable HFS is recomputed on H
// after every round.
StreamResult stream_sparsify(const EdgeSource& stream, std::size_t n,
                             const StreamConfig& cfg,
                             const LabeledProblem* labels = nullptr);

struct SparsifierReport {
  double min_eig = 0.0;
  double max_eig = 0.0;
  double epsilon = 0.0;
  bool pass = false;
  double edge_ratio = 0.0;  // |H| / |G| in unique edges
  bool sampled = false;     // randomized check: necessary, not sufficient
};

// Extreme generalized eigenvalues of (L_H, L_G) on range(L_G). Above the
// dense cap, falls back to 1000 random quadratic-form ratios.
SparsifierReport verify_sparsifier(const Graph& g, const Graph& h,
                                   double epsilon,
                                   std::size_t dense_cap = kDefaultDenseCap,
                                   std::uint64_t seed = 0);

// Edge-list text with header `# sparsifier n=.. eps=.. N=.. round=..` and
// rows `u v w p a c` (a: original weight, c: multiplicity).
void write_sparsifier(const Sparsifier& s, const std::filesystem::path& path);
Sparsifier read_sparsifier(const std::filesystem::path& path);

}  // namespace shfs
