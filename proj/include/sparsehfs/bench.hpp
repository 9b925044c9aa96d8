#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sparsehfs/graph.hpp"
#include "sparsehfs/problem.hpp"
#include "sparsehfs/sparsify.hpp"

namespace shfs {

// Four planar Gaussian clusters; the two upper ones form class +1 and the two
// lower ones class -1.
struct ClusterSpec {
  std::array<std::array<double, 2>, 4> centers{
      {{-2.0, 2.0}, {2.0, 2.0}, {-2.0, -2.0}, {2.0, -2.0}}};
  double stddev = 0.35;
  std::array<std::size_t, 4> counts{};
  std::array<double, 4> classes{1.0, 1.0, -1.0, -1.0};

  // Equal counts, remainder spread over the first clusters.
  static ClusterSpec with_total(std::size_t n, double stddev = 0.35);
  std::size_t total() const;
  // Highest / lowest center; ties go to the lower cluster index.
  std::size_t uppermost() const;
  std::size_t lowermost() const;
};

struct Dataset {
  PointCloud points;
  Vector truth;                        // +-1 per point
  std::vector<std::uint32_t> cluster;  // cluster index per point
};

Dataset generate_dataset(const ClusterSpec& spec, std::uint64_t seed);

// labels_per_class points from the uppermost cluster and as many from the
// lowermost one, labelled with their true class.
LabeledProblem select_labels(const Dataset& data, const ClusterSpec& spec,
                             std::size_t labels_per_class, double gamma,
                             std::uint64_t seed);

struct ExperimentConfig {
  std::size_t n = 1210;
  std::vector<std::size_t> k_values{10, 50, 100, 200, 450, 600};
  double gamma = 1.0;
  double epsilon = 0.8;
  std::size_t labels_per_class = 2;
  std::uint64_t seed = 0;
  std::size_t batch_size = 0;  // 0: n ln^2(n) / eps^2
  double cluster_std = 0.35;
  KnnSymmetrization symmetrization = KnnSymmetrization::kUnion;
  double sketch_constant = SketchOptions{}.constant;
  double log_base = 0.0;  // <= 0: natural log
  std::filesystem::path out_dir;  // empty: no files written
};

struct SweepRow {
  std::size_t k = 0;
  std::size_t m = 0;
  double accuracy_stable = 0.0;
  double accuracy_sparse = 0.0;
  double risk_stable = 0.0;
  double risk_sparse = 0.0;
  double edge_ratio = 0.0;
  double wall_time_stable = 0.0;  // seconds
  double wall_time_sparse = 0.0;
  std::size_t rounds = 0;
  std::size_t batch_size = 0;
  std::size_t peak_retained = 0;
  // min over rounds of (|H| before the round + batch_size - retained peak)
  std::size_t min_headroom = 0;
  std::size_t sparsifier_edges = 0;
  std::size_t components = 0;
  std::string error;
};

// Runs one k: k-NN graph, shuffled edge stream through sparse HFS, stable HFS
// on the full graph. Throws on internal failure (run_sweep records it).
SweepRow run_sweep_point(const ExperimentConfig& cfg, const Dataset& data,
                         const LabeledProblem& labels, std::size_t k);

// Writes sweep.csv, accuracy.svg, risk.svg and edge_ratio.svg to
// cfg.out_dir when it is set.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg);

void write_sweep_csv(const std::vector<SweepRow>& rows,
                     const std::filesystem::path& path);
void emit_plots(const std::vector<SweepRow>& rows,
                const std::filesystem::path& dir);

}  // namespace shfs
