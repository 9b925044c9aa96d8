#include "sparsehfs/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

#include "sparsehfs/error.hpp"
#include "sparsehfs/hfs.hpp"
#include "sparsehfs/io.hpp"
#include "sparsehfs/rng.hpp"
#include "sparsehfs/svg_plot.hpp"

namespace shfs {

ClusterSpec ClusterSpec::with_total(std::size_t n, double stddev) {
  ClusterSpec spec;
  spec.stddev = stddev;
  for (std::size_t c = 0; c < 4; ++c) spec.counts[c] = n / 4 + (c < n % 4 ? 1 : 0);
  return spec;
}

std::size_t ClusterSpec::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

std::size_t ClusterSpec::uppermost() const {
  std::size_t best = 0;
  for (std::size_t c = 1; c < 4; ++c) {
    if (centers[c][1] > centers[best][1]) best = c;
  }
  return best;
}

std::size_t ClusterSpec::lowermost() const {
  std::size_t best = 0;
  for (std::size_t c = 1; c < 4; ++c) {
    if (centers[c][1] < centers[best][1]) best = c;
  }
  return best;
}

Dataset generate_dataset(const ClusterSpec& spec, std::uint64_t seed) {
  if (!(spec.stddev >= 0.0)) throw ValidationError("cluster std must be >= 0");
  const std::size_t n = spec.total();
  if (n < 2) throw ValidationError("dataset needs at least 2 points");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> coords;
  coords.reserve(2 * n);
  Vector truth(static_cast<Eigen::Index>(n));
  std::vector<std::uint32_t> cluster;
  cluster.reserve(n);
  for (std::size_t c = 0; c < 4; ++c) {
    for (std::size_t i = 0; i < spec.counts[c]; ++i) {
      const double dx = normal(rng);
      const double dy = normal(rng);
      coords.push_back(spec.centers[c][0] + spec.stddev * dx);
      coords.push_back(spec.centers[c][1] + spec.stddev * dy);
      truth[static_cast<Eigen::Index>(cluster.size())] = spec.classes[c];
      cluster.push_back(static_cast<std::uint32_t>(c));
    }
  }
  return {PointCloud(2, std::move(coords)), std::move(truth), std::move(cluster)};
}

LabeledProblem select_labels(const Dataset& data, const ClusterSpec& spec,
                             std::size_t labels_per_class, double gamma,
                             std::uint64_t seed) {
  if (labels_per_class < 1) {
    throw ValidationError("labels_per_class must be >= 1");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::pair<NodeId, double>> labels;
  for (std::size_t target : {spec.uppermost(), spec.lowermost()}) {
    std::vector<NodeId> members;
    for (std::size_t i = 0; i < data.cluster.size(); ++i) {
      if (data.cluster[i] == target) members.push_back(static_cast<NodeId>(i));
    }
    if (members.size() < labels_per_class) {
      throw ValidationError("cluster " + std::to_string(target) + " has " +
                            std::to_string(members.size()) +
                            " points, fewer than labels_per_class");
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t i = 0; i < labels_per_class; ++i) {
      labels.emplace_back(members[i], data.truth[members[i]]);
    }
  }
  return LabeledProblem(data.truth.size(), labels, gamma, 1.0);
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

SweepRow run_sweep_point(const ExperimentConfig& cfg, const Dataset& data,
                         const LabeledProblem& labels, std::size_t k) {
  const std::size_t n = data.points.size();
  SweepRow row;
  row.k = k;
  const Graph g = knn_graph(data.points, k, cfg.symmetrization);
  row.m = g.num_edges();
  row.components = num_components(g);

  HfsOptions hopts;
  hopts.allow_disconnected = true;

  auto start = std::chrono::steady_clock::now();
  const HfsSolution exact = stable_hfs(g, labels, hopts);
  row.wall_time_stable = seconds_since(start);
  const RiskReport exact_risk = evaluate_risks(exact, data.truth, labels);
  row.accuracy_stable = exact_risk.accuracy;
  row.risk_stable = exact_risk.generalization;

  std::vector<Edge> stream(g.edges().begin(), g.edges().end());
  std::mt19937_64 rng(derive_seed(cfg.seed, k));
  std::shuffle(stream.begin(), stream.end(), rng);

  StreamConfig scfg;
  scfg.epsilon = cfg.epsilon;
  scfg.batch_size = cfg.batch_size;
  scfg.seed = derive_seed(cfg.seed, k, 1);
  scfg.log = LogBase{cfg.log_base};
  scfg.resparsify.sketch.constant = cfg.sketch_constant;

  start = std::chrono::steady_clock::now();
  const SparseHfsResult sparse = sparse_hfs(edges_from(stream), n, labels, scfg, hopts);
  row.wall_time_sparse = seconds_since(start);
  const RiskReport sparse_risk = evaluate_risks(sparse.solution, data.truth, labels);
  row.accuracy_sparse = sparse_risk.accuracy;
  row.risk_sparse = sparse_risk.generalization;

  const auto& st = sparse.stream;
  row.rounds = st.rounds.size();
  row.batch_size = st.batch_size;
  row.peak_retained = st.peak_retained;
  row.sparsifier_edges = st.sparsifier.graph().num_edges();
  row.edge_ratio = static_cast<double>(row.sparsifier_edges) /
                   static_cast<double>(row.m);
  row.min_headroom = st.batch_size + (st.rounds.empty() ? 0 : st.rounds[0].h_entries_before);
  for (const RoundStats& r : st.rounds) {
    const std::size_t cap = r.h_entries_before + st.batch_size;
    if (r.peak_retained > cap) {
      throw NumericalError("memory contract violated in round " +
                           std::to_string(r.round));
    }
    row.min_headroom = std::min(row.min_headroom, cap - r.peak_retained);
  }
  return row;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
  if (cfg.k_values.empty()) throw ValidationError("k_values is empty");
  for (std::size_t k : cfg.k_values) {
    if (k < 1 || k >= cfg.n) {
      throw ValidationError("every k must satisfy 1 <= k < n");
    }
  }
  const ClusterSpec spec = ClusterSpec::with_total(cfg.n, cfg.cluster_std);
  const Dataset data = generate_dataset(spec, cfg.seed);
  const LabeledProblem labels =
      select_labels(data, spec, cfg.labels_per_class, cfg.gamma,
                    derive_seed(cfg.seed, 0x6c6162656c73ULL));

  std::vector<SweepRow> rows;
  for (std::size_t k : cfg.k_values) {
    try {
      rows.push_back(run_sweep_point(cfg, data, labels, k));
    } catch (const std::exception& ex) {
      SweepRow row;
      row.k = k;
      row.error = ex.what();
      rows.push_back(row);
    }
  }
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    write_sweep_csv(rows, cfg.out_dir / "sweep.csv");
    emit_plots(rows, cfg.out_dir);
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "k,m,accuracy_stable,accuracy_sparse,R_stable,R_sparse,edge_ratio,"
         "wall_time_stable,wall_time_sparse,rounds,batch_size,peak_retained,"
         "sparsifier_edges,components,error\n";
  for (const SweepRow& r : rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "%zu,%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.4f,%.4f,%zu,%zu,%zu,%zu,%zu,",
                  r.k, r.m, r.accuracy_stable, r.accuracy_sparse, r.risk_stable,
                  r.risk_sparse, r.edge_ratio, r.wall_time_stable,
                  r.wall_time_sparse, r.rounds, r.batch_size, r.peak_retained,
                  r.sparsifier_edges, r.components);
    out << buf << err << '\n';
  }
}

void emit_plots(const std::vector<SweepRow>& rows,
                const std::filesystem::path& dir) {
  if (rows.empty()) throw ValidationError("emit_plots: no rows");
  std::vector<double> ks, acc_stable, acc_sparse, r_stable, r_sparse, ratio;
  for (const SweepRow& r : rows) {
    if (!r.error.empty()) continue;
    ks.push_back(static_cast<double>(r.k));
    acc_stable.push_back(r.accuracy_stable);
    acc_sparse.push_back(r.accuracy_sparse);
    r_stable.push_back(r.risk_stable);
    r_sparse.push_back(r.risk_sparse);
    ratio.push_back(r.edge_ratio);
  }
  auto write = [&](const std::string& name, const std::string& svg) {
    std::ofstream out(dir / name);
    if (!out) throw ValidationError("cannot write " + (dir / name).string());
    out << svg;
  };
  write("accuracy.svg",
        render_line_chart({"Accuracy vs k", "k", "accuracy", 0.0, 1.0},
                          {{"stable-HFS", ks, acc_stable, "#1f77b4"},
                           {"sparse-HFS", ks, acc_sparse, "#d62728"}}));
  write("risk.svg",
        render_line_chart({"Generalization error vs k", "k", "R(f)"},
                          {{"R(f) stable", ks, r_stable, "#1f77b4"},
                           {"R(f) sparse", ks, r_sparse, "#d62728"}}));
  write("edge_ratio.svg",
        render_line_chart({"Sparsifier size vs k", "k", "|H|/|G|", 0.0, 1.0},
                          {{"|H|/|G|", ks, ratio, "#2ca02c"}}));
}

}  // namespace shfs
