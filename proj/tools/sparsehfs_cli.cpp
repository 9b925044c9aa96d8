#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sparsehfs/analysis.hpp"
#include "sparsehfs/bench.hpp"
#include "sparsehfs/error.hpp"
#include "sparsehfs/hfs.hpp"
#include "sparsehfs/io.hpp"
#include "sparsehfs/reports.hpp"
#include "sparsehfs/rng.hpp"
#include "sparsehfs/sparsify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace shfs;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInternal = 1;
constexpr std::uint64_t kLabelSeedTag = 0x6c6162656c73ULL;

// JSON config: top-level keys set global flags, an object under a subcommand
// name sets that subcommand's flags. Arrays become repeated values.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    return {};
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      j = json::parse(input);
    } catch (const json::exception& ex) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + ex.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void collect(const json& obj, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : obj.items()) {
      std::string name = key;
      std::replace(name.begin(), name.end(), '_', '-');
      if (value.is_object()) {
        std::vector<std::string> nested = parents;
        nested.push_back(name);
        collect(value, nested, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = name;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }
};

struct Globals {
  std::uint64_t seed = 0;
  fs::path out = ".";
};

void emit(const json& j, const fs::path& path) {
  write_json(j, path);
  std::cout << j.dump(2) << '\n';
}

Vector truth_vector(const fs::path& path, std::size_t n) {
  const auto labels = read_labels(path);
  Vector truth = Vector::Zero(static_cast<Eigen::Index>(n));
  std::vector<bool> seen(n, false);
  for (const auto& [id, value] : labels) {
    if (id >= n) throw ValidationError(path.string() + ": node id out of range");
    truth[id] = value;
    seen[id] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw ValidationError(path.string() + ": truth must cover every node");
  }
  return truth;
}

KnnSymmetrization parse_symmetrization(const std::string& s) {
  return s == "mutual" ? KnnSymmetrization::kMutual : KnnSymmetrization::kUnion;
}

Graph load_graph(const fs::path& path) {
  const std::size_t n = edge_stream_node_count(path);
  return build_graph(read_edge_stream(path), n);
}

bool is_sparsifier_file(const fs::path& path) {
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  return first.rfind("# sparsifier", 0) == 0;
}

// --- generate ---------------------------------------------------------------

struct GenerateArgs {
  std::size_t n = 1210;
  double cluster_std = 0.35;
  std::size_t labels_per_class = 2;
};

void run_generate(const Globals& g, const GenerateArgs& a) {
  const ClusterSpec spec = ClusterSpec::with_total(a.n, a.cluster_std);
  const Dataset data = generate_dataset(spec, g.seed);
  const LabeledProblem labels = select_labels(data, spec, a.labels_per_class, 1.0,
                                              derive_seed(g.seed, kLabelSeedTag));
  fs::create_directories(g.out);
  write_point_cloud(data.points, g.out / "points.txt");
  std::vector<std::pair<NodeId, double>> truth, chosen;
  for (Eigen::Index i = 0; i < data.truth.size(); ++i) {
    truth.emplace_back(static_cast<NodeId>(i), data.truth[i]);
  }
  for (NodeId i : labels.labeled()) chosen.emplace_back(i, data.truth[i]);
  write_labels(truth, g.out / "truth.txt");
  write_labels(chosen, g.out / "labels.txt");
  emit({{"n", a.n}, {"l", labels.l()}, {"seed", g.seed}}, g.out / "generate.json");
}

// --- knn --------------------------------------------------------------------

struct KnnArgs {
  fs::path points;
  std::size_t k = 10;
  std::string symmetrization = "union";
};

void run_knn(const Globals& g, const KnnArgs& a) {
  const Graph graph =
      knn_graph(read_point_cloud(a.points), a.k, parse_symmetrization(a.symmetrization));
  fs::create_directories(g.out);
  write_edge_stream(graph, g.out / "edges.txt");
  emit({{"n", graph.num_nodes()},
        {"m", graph.num_edges()},
        {"k", a.k},
        {"components", num_components(graph)}},
       g.out / "knn.json");
}

// --- sparsify ---------------------------------------------------------------

struct StreamArgs {
  std::size_t n = 0;
  double epsilon = 0.5;
  std::size_t batch_size = 0;
  bool passthrough = false;
  bool exact_resistances = false;
  double sketch_constant = SketchOptions{}.constant;
  double log_base = 0.0;

  StreamConfig config(std::uint64_t seed) const {
    StreamConfig cfg;
    cfg.epsilon = epsilon;
    cfg.batch_size = batch_size;
    cfg.seed = seed;
    cfg.log = LogBase{log_base};
    cfg.resparsify.mode = passthrough ? SamplingMode::kPassthrough : SamplingMode::kSample;
    cfg.resparsify.resistance =
        exact_resistances ? ResistanceMode::kExact : ResistanceMode::kSketched;
    cfg.resparsify.sketch.constant = sketch_constant;
    return cfg;
  }
};

void add_stream_options(CLI::App* sub, StreamArgs& a) {
  sub->add_option("--n", a.n, "node count (default: from the file)");
  sub->add_option("--epsilon", a.epsilon, "sparsifier accuracy in (0,1)");
  sub->add_option("--batch-size", a.batch_size, "edges per batch (0: n ln^2 n / eps^2)");
  sub->add_flag("--passthrough", a.passthrough, "keep every edge (H = G)");
  sub->add_flag("--exact-resistances", a.exact_resistances,
                "dense exact resistances instead of the sketch");
  sub->add_option("--sketch-constant", a.sketch_constant, "JL row constant");
  sub->add_option("--log-base", a.log_base, "log base for N and batch size (<= 0: e)");
}

json rounds_json(const StreamResult& res) {
  json rounds = json::array();
  for (const RoundStats& r : res.rounds) rounds.push_back(to_json(r));
  return {{"batch_size", res.batch_size},
          {"edges_received", res.edges_received},
          {"peak_retained", res.peak_retained},
          {"rounds", rounds}};
}

struct SparsifyArgs {
  fs::path edges;
  StreamArgs stream;
};

void run_sparsify(const Globals& g, const SparsifyArgs& a) {
  const std::size_t n = a.stream.n > 0 ? a.stream.n : edge_stream_node_count(a.edges);
  EdgeStreamReader reader(a.edges);
  const StreamResult res =
      stream_sparsify([&] { return reader.next(); }, n, a.stream.config(g.seed));
  fs::create_directories(g.out);
  write_sparsifier(res.sparsifier, g.out / "sparsifier.txt");
  json j = rounds_json(res);
  j["n"] = n;
  j["epsilon"] = a.stream.epsilon;
  j["sparsifier_edges"] = res.sparsifier.graph().num_edges();
  emit(j, g.out / "sparsify.json");
}

// --- hfs --------------------------------------------------------------------

struct HfsArgs {
  fs::path edges;
  fs::path labels;
  fs::path truth;
  double gamma = 1.0;
  std::string stabilizer = "lagrangian";
  bool allow_disconnected = false;
  bool dense = false;
  StreamArgs stream;
};

void run_hfs(const Globals& g, const HfsArgs& a) {
  const std::size_t n = a.stream.n > 0 ? a.stream.n : edge_stream_node_count(a.edges);
  const auto labels = read_labels(a.labels);
  const LabeledProblem p(n, labels, a.gamma);
  HfsOptions opts;
  opts.stabilizer =
      a.stabilizer == "literal" ? StabilizerMode::kLiteral : StabilizerMode::kLagrangian;
  opts.allow_disconnected = a.allow_disconnected;
  if (a.dense) opts.solve.mode = SolveMode::kExactDense;

  HfsSolution sol;
  SolutionMeta meta{a.gamma, 0.0, 1.0};
  json extra;
  if (a.stream.epsilon > 0.0) {
    EdgeStreamReader reader(a.edges);
    const SparseHfsResult res = sparse_hfs([&] { return reader.next(); }, n, p,
                                           a.stream.config(g.seed), opts);
    sol = res.solution;
    const std::size_t m = res.stream.edges_received;
    meta.epsilon = a.stream.epsilon;
    meta.edge_ratio = m > 0 ? static_cast<double>(res.stream.sparsifier.graph().num_edges()) /
                                  static_cast<double>(m)
                            : 1.0;
    extra = rounds_json(res.stream);
  } else {
    sol = stable_hfs(load_graph(a.edges), p, opts);
  }
  fs::create_directories(g.out);
  write_solution(sol, meta, g.out / "solution.csv", g.out / "solution.json");
  json j = {{"mu", sol.mu},
            {"residual", sol.residual},
            {"graph_used", sol.graph_used == GraphUsed::kExact ? "exact" : "sparsified"},
            {"edge_ratio", meta.edge_ratio}};
  if (!extra.is_null()) j["stream"] = extra;
  if (!a.truth.empty()) {
    const RiskReport r = evaluate_risks(sol, truth_vector(a.truth, n), p);
    j["empirical_risk"] = r.empirical;
    j["generalization_risk"] = r.generalization;
    j["accuracy"] = r.accuracy;
  }
  emit(j, g.out / "hfs.json");
}

// --- verify -----------------------------------------------------------------

struct VerifyArgs {
  fs::path graph;
  fs::path sparsifier;
  double epsilon = 0.0;
  std::size_t dense_cap = kDefaultDenseCap;
};

void run_verify(const Globals& g, const VerifyArgs& a) {
  const Graph graph = load_graph(a.graph);
  Graph h;
  double eps = a.epsilon;
  if (is_sparsifier_file(a.sparsifier)) {
    const Sparsifier s = read_sparsifier(a.sparsifier);
    h = s.graph();
    if (eps <= 0.0) eps = s.epsilon();
  } else {
    h = build_graph(read_edge_stream(a.sparsifier), graph.num_nodes());
  }
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("--epsilon must be in (0,1)");
  const SparsifierReport rep = verify_sparsifier(graph, h, eps, a.dense_cap, g.seed);
  fs::create_directories(g.out);
  emit(to_json(rep), g.out / "verify.json");
}

// --- bound ------------------------------------------------------------------

struct BoundArgs {
  BoundInputs in;
  fs::path graph;
  bool from_sparsifier = false;
};

void run_bound(const Globals& g, BoundArgs a) {
  if (!a.graph.empty()) {
    const Graph graph = load_graph(a.graph);
    a.in.spectra = a.from_sparsifier ? spectral_summary_from_sparsifier(graph, a.in.epsilon)
                                     : spectral_summary(graph);
  }
  json j = to_json(a.in);
  j["bound"] = to_json(generalization_bound(a.in));
  fs::create_directories(g.out);
  emit(j, g.out / "bound.json");
}

// --- probe ------------------------------------------------------------------

struct ProbeArgs {
  fs::path graph;
  fs::path truth;
  std::size_t l = 4;
  double gamma = 1.0;
  std::size_t trials = 100;
  bool exhaustive = false;
};

void run_probe(const Globals& g, const ProbeArgs& a) {
  const Graph graph = load_graph(a.graph);
  const Vector truth = truth_vector(a.truth, graph.num_nodes());
  const ProbeResult r =
      stability_probe(graph, truth, a.l, a.gamma, a.trials, g.seed,
                      a.exhaustive ? ProbeMode::kExhaustive : ProbeMode::kSampled);
  json j = to_json(r);
  BoundInputs in;
  in.l = a.l;
  in.gamma = a.gamma;
  in.k = truth.cwiseAbs().maxCoeff();
  in.spectra = spectral_summary(graph);
  j["denominator"] = stability_denominator(in);
  if (stability_denominator(in) > 0.0) {
    j["beta_bound"] = beta_bound(in);
  } else {
    j["beta_bound"] = nullptr;
  }
  fs::create_directories(g.out);
  emit(j, g.out / "probe.json");
}

// --- sweep ------------------------------------------------------------------

struct SweepArgs {
  ExperimentConfig cfg;
  std::string symmetrization = "union";
};

void run_sweep_cmd(const Globals& g, SweepArgs a) {
  a.cfg.seed = g.seed;
  a.cfg.out_dir = g.out;
  a.cfg.symmetrization = parse_symmetrization(a.symmetrization);
  const auto rows = run_sweep(a.cfg);
  json out = json::array();
  for (const SweepRow& r : rows) {
    out.push_back({{"k", r.k},
                   {"m", r.m},
                   {"accuracy_stable", r.accuracy_stable},
                   {"accuracy_sparse", r.accuracy_sparse},
                   {"edge_ratio", r.edge_ratio},
                   {"error", r.error}});
  }
  std::cout << out.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming spectral sparsification and stable harmonic-function "
               "semi-supervised learning"};
  app.require_subcommand(1);
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config file; command-line flags take precedence");

  Globals globals;
  app.add_option("--seed", globals.seed, "random seed");
  app.add_option("--out", globals.out, "output directory");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "four-cluster planar dataset");
  generate->add_option("--n", gen.n, "number of points");
  generate->add_option("--cluster-std", gen.cluster_std, "per-cluster standard deviation");
  generate->add_option("--labels-per-class", gen.labels_per_class, "labels per class");

  KnnArgs knn;
  auto* knn_cmd = app.add_subcommand("knn", "unweighted k-nearest-neighbour graph");
  knn_cmd->add_option("--points", knn.points, "point file")->required();
  knn_cmd->add_option("--k", knn.k, "neighbours per point");
  knn_cmd->add_option("--symmetrization", knn.symmetrization, "union or mutual")
      ->check(CLI::IsMember({"union", "mutual"}));

  SparsifyArgs sp;
  auto* sparsify = app.add_subcommand("sparsify", "stream an edge file into a sparsifier");
  sparsify->add_option("--edges", sp.edges, "edge file")->required();
  add_stream_options(sparsify, sp.stream);

  HfsArgs hfs;
  hfs.stream.epsilon = 0.0;
  auto* hfs_cmd = app.add_subcommand("hfs", "stable HFS, or sparse HFS when --epsilon > 0");
  hfs_cmd->add_option("--edges", hfs.edges, "edge file")->required();
  hfs_cmd->add_option("--labels", hfs.labels, "labeled nodes `id value`")->required();
  hfs_cmd->add_option("--truth", hfs.truth, "labels for every node, for risk reports");
  hfs_cmd->add_option("--gamma", hfs.gamma, "regularization");
  hfs_cmd->add_option("--stabilizer", hfs.stabilizer, "lagrangian or literal")
      ->check(CLI::IsMember({"lagrangian", "literal"}));
  hfs_cmd->add_flag("--allow-disconnected", hfs.allow_disconnected,
                    "unlabeled components get f = 0 instead of an error");
  hfs_cmd->add_flag("--dense", hfs.dense, "dense LDLT instead of conjugate gradient");
  add_stream_options(hfs_cmd, hfs.stream);

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "generalized eigenvalue check of H against G");
  verify->add_option("--graph", ver.graph, "edge file of G")->required();
  verify->add_option("--sparsifier", ver.sparsifier, "sparsifier or edge file of H")
      ->required();
  verify->add_option("--epsilon", ver.epsilon, "target (default: the sparsifier's)");
  verify->add_option("--dense-cap", ver.dense_cap, "largest n for the dense check");

  BoundArgs bnd;
  auto* bound = app.add_subcommand("bound", "generalization bound terms");
  bound->add_option("--l", bnd.in.l, "labeled nodes");
  bound->add_option("--u", bnd.in.u, "unlabeled nodes");
  bound->add_option("--gamma", bnd.in.gamma, "regularization");
  bound->add_option("--epsilon", bnd.in.epsilon, "sparsifier accuracy");
  bound->add_option("--k", bnd.in.k, "label bound |y| <= k");
  bound->add_option("--c", bnd.in.c, "loss bound |f - y| <= c");
  bound->add_option("--delta", bnd.in.delta, "confidence parameter");
  bound->add_option("--lambda1", bnd.in.spectra.lambda_1, "Fiedler value of G");
  bound->add_option("--lambdan", bnd.in.spectra.lambda_n, "largest eigenvalue of G");
  bound->add_option("--rhat", bnd.in.empirical_rhat, "empirical risk of stable HFS");
  bound->add_option("--graph", bnd.graph, "edge file to take the spectrum from");
  bound->add_flag("--from-sparsifier", bnd.from_sparsifier,
                  "--graph is an eps-sparsifier; rescale its spectrum");

  ProbeArgs prb;
  auto* probe = app.add_subcommand("probe", "empirical uniform stability");
  probe->add_option("--graph", prb.graph, "edge file")->required();
  probe->add_option("--truth", prb.truth, "labels for every node")->required();
  probe->add_option("--l", prb.l, "labeled set size");
  probe->add_option("--gamma", prb.gamma, "regularization");
  probe->add_option("--trials", prb.trials, "random swap pairs");
  probe->add_flag("--exhaustive", prb.exhaustive, "all pairs (n <= 12, l <= 3)");

  SweepArgs swp;
  auto* sweep = app.add_subcommand("sweep", "k sweep on the four-cluster dataset");
  sweep->add_option("--n", swp.cfg.n, "number of points");
  sweep->add_option("--k-values", swp.cfg.k_values, "k values")->expected(1, -1);
  sweep->add_option("--gamma", swp.cfg.gamma, "regularization");
  sweep->add_option("--epsilon", swp.cfg.epsilon, "sparsifier accuracy");
  sweep->add_option("--labels-per-class", swp.cfg.labels_per_class, "labels per class");
  sweep->add_option("--batch-size", swp.cfg.batch_size, "edges per batch (0: default)");
  sweep->add_option("--cluster-std", swp.cfg.cluster_std, "per-cluster standard deviation");
  sweep->add_option("--symmetrization", swp.symmetrization, "union or mutual")
      ->check(CLI::IsMember({"union", "mutual"}));
  sweep->add_option("--sketch-constant", swp.cfg.sketch_constant, "JL row constant");
  sweep->add_option("--log-base", swp.cfg.log_base, "log base (<= 0: e)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*generate) run_generate(globals, gen);
    if (*knn_cmd) run_knn(globals, knn);
    if (*sparsify) run_sparsify(globals, sp);
    if (*hfs_cmd) run_hfs(globals, hfs);
    if (*verify) run_verify(globals, ver);
    if (*bound) run_bound(globals, bnd);
    if (*probe) run_probe(globals, prb);
    if (*sweep) run_sweep_cmd(globals, swp);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return 0;
}
