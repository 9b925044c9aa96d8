#include "sparsehfs/sparsify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "sparsehfs/error.hpp"
#include "sparsehfs/hfs.hpp"
#include "sparsehfs/rng.hpp"

namespace shfs {
namespace {

constexpr std::uint64_t kTagSketch = 0x736b65746368ULL;
constexpr std::uint64_t kTagRetain = 0x72657461696eULL;
constexpr std::uint64_t kTagBatch = 0x6261746368ULL;
// Absorbs rounding in eigenvalues that sit exactly on the bracket edge.
constexpr double kBracketSlack = 1e-9;

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ValidationError("epsilon must lie in (0, 1), got " +
                          std::to_string(epsilon));
  }
}

Graph collapse(std::size_t n, const std::vector<SparsifierEntry>& entries) {
  std::vector<Edge> edges;
  edges.reserve(entries.size());
  for (const auto& e : entries) edges.push_back({e.u, e.v, e.weight});
  return build_graph(edges, n);
}

std::uint64_t edge_key(NodeId u, NodeId v) {
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

}  // namespace

double LogBase::operator()(double x) const {
  return base > 0.0 ? std::log(x) / std::log(base) : std::log(x);
}

std::int64_t copy_count(std::size_t n, double epsilon, LogBase log) {
  check_epsilon(epsilon);
  const double alpha = 1.0 / (1.0 - epsilon);
  const double lg = log(static_cast<double>(n));
  return static_cast<std::int64_t>(std::max(
      1.0, std::ceil(alpha * alpha * static_cast<double>(n) * lg * lg /
                     (epsilon * epsilon))));
}

std::size_t default_batch_size(std::size_t n, double epsilon, LogBase log) {
  check_epsilon(epsilon);
  const double lg = log(static_cast<double>(n));
  return static_cast<std::size_t>(std::max(
      1.0, std::ceil(static_cast<double>(n) * lg * lg / (epsilon * epsilon))));
}

Sparsifier::Sparsifier(std::size_t n, double epsilon, LogBase log)
    : n_(n),
      epsilon_(epsilon),
      copy_count_(shfs::copy_count(n, epsilon, log)),
      graph_(n) {}

Sparsifier::Sparsifier(std::size_t n, double epsilon, std::int64_t copy_count,
                       std::size_t round, std::vector<SparsifierEntry> entries)
    : n_(n),
      epsilon_(epsilon),
      copy_count_(copy_count),
      round_(round),
      entries_(std::move(entries)) {
  check_epsilon(epsilon);
  if (copy_count_ < 1) throw ValidationError("copy count must be positive");
  for (const auto& e : entries_) {
    if (!(e.prob > 0.0 && e.prob <= 1.0)) {
      throw ValidationError("sparsifier probabilities must lie in (0, 1]");
    }
  }
  graph_ = collapse(n_, entries_);
}

Sparsifier resparsify(const Sparsifier& s, const Graph& batch,
                      std::uint64_t seed, const ResparsifyOptions& opts) {
  check_epsilon(s.epsilon());
  const std::size_t n = s.n();
  if (batch.num_nodes() != n) {
    throw ValidationError("batch node count " +
                          std::to_string(batch.num_nodes()) +
                          " does not match sparsifier n=" + std::to_string(n));
  }
  const std::size_t round = s.round();
  std::vector<SparsifierEntry> out;

  if (opts.mode == SamplingMode::kPassthrough) {
    out = s.entries();
    for (const Edge& e : batch.edges()) {
      out.push_back({e.u, e.v, e.weight, 1.0, e.weight, 1});
    }
    return Sparsifier(n, s.epsilon(), s.copy_count(), round + 1,
                      std::move(out));
  }

  const Graph combined = add_graphs(s.graph(), batch);
  if (!opts.allow_disconnected && !is_connected(combined)) {
    throw DisconnectedGraphError("resparsify: H + A is disconnected");
  }

  const double alpha = s.alpha();
  ResistanceEstimate r;
  if (opts.resistance == ResistanceMode::kExact) {
    r = exact_resistances(combined, opts.sketch.solve.dense_cap,
                          opts.allow_disconnected);
  } else {
    SketchOptions sk = opts.sketch;
    sk.allow_disconnected = opts.allow_disconnected;
    r = sketch_resistances(combined, alpha,
                           derive_seed(seed, kTagSketch, round), sk);
  }
  auto resistance_of = [&](NodeId u, NodeId v) {
    const std::ptrdiff_t idx = combined.find_edge(u, v);
    return r.values[static_cast<std::size_t>(idx)];
  };

  const double denom = alpha * static_cast<double>(n - 1);
  const auto copies = s.copy_count();
  out.reserve(s.entries().size() + batch.num_edges());

  // Retained edges: shrink the probability and keep each stored copy with
  // ratio p'/p.
  for (std::size_t i = 0; i < s.entries().size(); ++i) {
    const SparsifierEntry& e = s.entries()[i];
    const double fresh =
        std::min(1.0, e.base_weight * resistance_of(e.u, e.v) / denom);
    const double p = std::min(e.prob, fresh);
    if (!(p > 0.0)) continue;
    std::int64_t kept_copies = e.multiplicity;
    if (p < e.prob) {
      SplitMix64 rng(derive_seed(seed, kTagRetain, round,
                                 edge_key(e.u, e.v) ^ mix64(i)));
      std::binomial_distribution<std::int64_t> thin(e.multiplicity,
                                                    p / e.prob);
      kept_copies = thin(rng);
    }
    if (kept_copies == 0) continue;
    SparsifierEntry kept = e;
    kept.multiplicity = kept_copies;
    kept.weight = static_cast<double>(kept_copies) * e.base_weight /
                  (static_cast<double>(copies) * p);
    kept.prob = p;
    out.push_back(kept);
  }

  // New edges: Binomial(N, p') copies, each of weight a / (N p').
  for (const Edge& e : batch.edges()) {
    const double p = std::min(1.0, e.weight * resistance_of(e.u, e.v) / denom);
    if (!(p > 0.0)) continue;
    SplitMix64 rng(derive_seed(seed, kTagBatch, round, edge_key(e.u, e.v)));
    std::binomial_distribution<std::int64_t> draw(copies, p);
    const std::int64_t c = draw(rng);
    if (c == 0) continue;
    out.push_back({e.u, e.v,
                   static_cast<double>(c) * e.weight /
                       (static_cast<double>(copies) * p),
                   p, e.weight, c});
  }

  return Sparsifier(n, s.epsilon(), copies, round + 1, std::move(out));
}

StreamResult stream_sparsify(const EdgeSource& stream, std::size_t n,
                             const StreamConfig& cfg,
                             const LabeledProblem* labels) {
  check_epsilon(cfg.epsilon);
  if (n < 2) throw ValidationError("stream_sparsify needs n >= 2");
  if (labels != nullptr && labels->n() != n) {
    throw ValidationError("label vector length does not match n");
  }
  const std::size_t batch_size = cfg.batch_size > 0
                                     ? cfg.batch_size
                                     : default_batch_size(n, cfg.epsilon, cfg.log);

  StreamResult result{Sparsifier(n, cfg.epsilon, cfg.log), {}, {}, batch_size,
                      0, 0};
  ResparsifyOptions ropts = cfg.resparsify;
  ropts.allow_disconnected = true;

  std::vector<Edge> pending;
  pending.reserve(std::min<std::size_t>(batch_size, 1 << 20));

  auto run_round = [&] {
    const Graph batch = build_graph(pending, n);
    pending.clear();
    RoundStats stats;
    stats.round = result.sparsifier.round();
    stats.batch_edges = batch.num_edges();
    stats.h_entries_before = result.sparsifier.entries().size();
    stats.peak_retained = stats.h_entries_before + stats.batch_edges;

    const std::size_t components_before =
        num_components(add_graphs(result.sparsifier.graph(), batch));
    result.sparsifier =
        resparsify(result.sparsifier, batch, cfg.seed, ropts);
    if (num_components(result.sparsifier.graph()) > components_before) {
      throw DisconnectedGraphError(
          "batch " + std::to_string(stats.round) +
          ": resparsification disconnected the sparsifier");
    }
    stats.h_entries_after = result.sparsifier.entries().size();
    stats.h_edges = result.sparsifier.graph().num_edges();
    result.peak_retained = std::max(result.peak_retained, stats.peak_retained);
    result.rounds.push_back(stats);

    if (labels != nullptr && cfg.recompute_each_batch) {
      HfsOptions hopts;
      hopts.allow_disconnected = true;
      HfsSolution sol = stable_hfs(result.sparsifier.graph(), *labels, hopts);
      sol.graph_used = GraphUsed::kSparsified;
      result.trace.push_back(std::move(sol));
    }
  };

  while (auto e = stream()) {
    pending.push_back(*e);
    ++result.edges_received;
    if (pending.size() == batch_size) run_round();
  }
  if (!pending.empty()) run_round();
  if (result.edges_received == 0) {
    throw ValidationError("stream_sparsify: empty edge stream");
  }
  return result;
}

SparsifierReport verify_sparsifier(const Graph& g, const Graph& h,
                                   double epsilon, std::size_t dense_cap,
                                   std::uint64_t seed) {
  if (g.num_nodes() != h.num_nodes()) {
    throw ValidationError("verify_sparsifier: node counts differ");
  }
  if (!(epsilon >= 0.0)) throw ValidationError("epsilon must be non-negative");
  const std::size_t n = g.num_nodes();
  SparsifierReport rep;
  rep.epsilon = epsilon;
  rep.edge_ratio = g.num_edges() == 0
                       ? 0.0
                       : static_cast<double>(h.num_edges()) /
                             static_cast<double>(g.num_edges());

  if (n <= dense_cap) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(dense_laplacian(g));
    const Vector& lambda = eig.eigenvalues();
    const double cutoff = 1e-9 * std::max(1.0, lambda.cwiseAbs().maxCoeff());
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
      if (lambda[i] > cutoff) keep.push_back(i);
    }
    DenseMatrix basis(static_cast<Eigen::Index>(n),
                      static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
      basis.col(static_cast<Eigen::Index>(j)) =
          eig.eigenvectors().col(keep[j]) / std::sqrt(lambda[keep[j]]);
    }
    const DenseMatrix pencil =
        basis.transpose() * dense_laplacian(h) * basis;
    Eigen::SelfAdjointEigenSolver<DenseMatrix> gen(pencil,
                                                   Eigen::EigenvaluesOnly);
    if (gen.eigenvalues().size() == 0) {
      rep.min_eig = rep.max_eig = 1.0;
    } else {
      rep.min_eig = gen.eigenvalues().minCoeff();
      rep.max_eig = gen.eigenvalues().maxCoeff();
    }
  } else {
    rep.sampled = true;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    rep.min_eig = std::numeric_limits<double>::infinity();
    rep.max_eig = -std::numeric_limits<double>::infinity();
    Vector x(static_cast<Eigen::Index>(n));
    for (int t = 0; t < 1000; ++t) {
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = normal(rng);
      x.array() -= x.mean();
      const double qg = quadratic_form(g, x);
      if (!(qg > 0.0)) continue;
      const double ratio = quadratic_form(h, x) / qg;
      rep.min_eig = std::min(rep.min_eig, ratio);
      rep.max_eig = std::max(rep.max_eig, ratio);
    }
  }
  rep.pass = rep.min_eig >= 1.0 - epsilon - kBracketSlack &&
             rep.max_eig <= 1.0 + epsilon + kBracketSlack;
  return rep;
}

void write_sparsifier(const Sparsifier& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "# sparsifier n=" << s.n() << " eps=" << format_real(s.epsilon())
      << " N=" << s.copy_count() << " round=" << s.round() << '\n';
  for (const auto& e : s.entries()) {
    out << e.u << ' ' << e.v << ' ' << format_real(e.weight) << ' '
        << format_real(e.prob) << ' ' << format_real(e.base_weight) << ' '
        << e.multiplicity << '\n';
  }
}

Sparsifier read_sparsifier(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::size_t n = 0, round = 0;
  double eps = 0.0;
  std::int64_t copies = 0;
  bool have_header = false;
  std::vector<SparsifierEntry> entries;
  auto fail = [&](const std::string& why) {
    throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                          ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.rfind("# sparsifier", 0) == 0) {
      std::istringstream ss(line.substr(12));
      std::string tok;
      while (ss >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) fail("bad header token '" + tok + "'");
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        try {
          if (key == "n") n = std::stoull(val);
          else if (key == "eps") eps = std::stod(val);
          else if (key == "N") copies = std::stoll(val);
          else if (key == "round") round = std::stoull(val);
        } catch (const std::exception&) {
          fail("bad header value '" + tok + "'");
        }
      }
      have_header = true;
      continue;
    }
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    if (!have_header) fail("missing `# sparsifier` header");
    std::istringstream ss(line);
    SparsifierEntry e;
    if (!(ss >> e.u >> e.v >> e.weight >> e.prob)) {
      fail("expected `u v w p [a c]`");
    }
    if (ss >> e.base_weight) {
      if (!(ss >> e.multiplicity)) fail("multiplicity missing after a");
    } else {
      // Four-column rows describe a single copy.
      e.multiplicity = 1;
      e.base_weight = e.weight * static_cast<double>(copies) * e.prob;
    }
    if (e.u == e.v) fail("self-loop");
    if (e.u >= n || e.v >= n) fail("endpoint out of range");
    if (!(e.weight > 0.0)) fail("non-positive weight");
    if (e.u > e.v) std::swap(e.u, e.v);
    entries.push_back(e);
  }
  if (!have_header) throw ValidationError(path.string() + ": missing header");
  return Sparsifier(n, eps, copies, round, std::move(entries));
}

}  // namespace shfs
