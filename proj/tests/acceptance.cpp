// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "sparsehfs/analysis.hpp"
#include "sparsehfs/bench.hpp"
#include "sparsehfs/hfs.hpp"
#include "sparsehfs/resistance.hpp"
#include "sparsehfs/sparsify.hpp"
#include "test_util.hpp"

using namespace shfs;
using namespace shfs::testing;

namespace {

// Tolerances and budgets.
constexpr double kFosterTol = 1e-8;
constexpr double kFosterBudgetSec = 10.0;
constexpr double kSketchAlpha = 1.25;
constexpr int kSketchRequired = 95;
constexpr int kUnbiasedSeeds = 10000;
constexpr double kUnbiasedSe = 3.0;
constexpr double kQualityLo = 0.4;
constexpr double kQualityHi = 1.6;
constexpr int kQualityRequired = 90;
constexpr double kExactnessTol = 1e-8;
constexpr double kCenteringTol = 1e-8;
constexpr double kHandTol = 1e-12;
constexpr double kCalculatorTol = 1e-5;
constexpr int kProbeRequired = 19;
constexpr double kKneeLow = 0.6;
constexpr double kKneeHigh = 0.9;
constexpr double kSparseGap = 0.05;
constexpr double kEdgeRatioMax = 0.3;
constexpr double kSweepBudgetSec = 600.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

Outcome foster_identity() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 10 + seed % 41;
    const Graph g = random_connected(n, 2 * n, seed);
    const double sum = foster_sum(g, exact_resistances(g));
    worst = std::max(worst, std::abs(sum - static_cast<double>(n - 1)));
  }
  const double secs = seconds_since(t0);
  return {worst <= kFosterTol && secs < kFosterBudgetSec,
          fmt("max |sum a_e R_e - (n-1)| = %.2e over 100 graphs, %.2fs", worst, secs)};
}

Outcome sketch_bracket() {
  const Graph g = random_connected(30, 60, 2024);
  const ResistanceEstimate exact = exact_resistances(g);
  int good = 0;
  double worst = 1.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const ResistanceEstimate est = sketch_resistances(g, kSketchAlpha, seed);
    bool ok = true;
    for (std::size_t e = 0; e < exact.values.size(); ++e) {
      const double ratio = est.values[e] / exact.values[e];
      worst = std::max({worst, ratio, 1.0 / ratio});
      ok = ok && ratio >= 1.0 / kSketchAlpha && ratio <= kSketchAlpha;
    }
    good += ok ? 1 : 0;
  }
  return {good >= kSketchRequired,
          fmt("%d/100 seeds inside [1/a, a], a=%.2f, worst ratio %.3f, %zu sketch rows",
              good, kSketchAlpha, worst, sketch_dimension(30, kSketchAlpha, SketchOptions{}.constant))};
}

Outcome unbiasedness() {
  const Graph g = random_connected(6, 6, 7);
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  DenseMatrix sum = DenseMatrix::Zero(n, n), sum_sq = DenseMatrix::Zero(n, n);
  const Sparsifier empty(g.num_nodes(), 0.5);
  for (int s = 0; s < kUnbiasedSeeds; ++s) {
    const DenseMatrix l =
        dense_laplacian(resparsify(empty, g, static_cast<std::uint64_t>(s)).graph());
    sum += l;
    sum_sq += l.cwiseProduct(l);
  }
  const double t = kUnbiasedSeeds;
  const DenseMatrix mean = sum / t;
  const DenseMatrix var = (sum_sq / t - mean.cwiseProduct(mean)) * (t / (t - 1.0));
  const DenseMatrix se = (var.cwiseMax(0.0) / t).cwiseSqrt();
  const DenseMatrix dev = (mean - dense_laplacian(g)).cwiseAbs();
  double worst = 0.0;
  bool ok = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      ok = ok && dev(i, j) <= kUnbiasedSe * se(i, j) + 1e-12;
      if (se(i, j) > 0.0) worst = std::max(worst, dev(i, j) / se(i, j));
    }
  }
  return {ok, fmt("6-node graph, %d seeds, worst |mean - L_G| = %.2f SE", kUnbiasedSeeds,
                  worst)};
}

Outcome sparsifier_quality() {
  int good = 0;
  double lo = 1.0, hi = 1.0, ratio = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Graph g = erdos_renyi(200, 0.1, 1000 + seed);
    std::vector<Edge> edges(g.edges().begin(), g.edges().end());
    StreamConfig cfg;
    cfg.epsilon = 0.5;
    cfg.seed = seed;
    cfg.resparsify.allow_disconnected = !is_connected(g);
    const StreamResult res = stream_sparsify(edges_from(edges), 200, cfg);
    const SparsifierReport rep = verify_sparsifier(g, res.sparsifier.graph(), 0.5);
    lo = std::min(lo, rep.min_eig);
    hi = std::max(hi, rep.max_eig);
    ratio += rep.edge_ratio / 100.0;
    good += rep.min_eig >= kQualityLo && rep.max_eig <= kQualityHi ? 1 : 0;
  }
  return {good >= kQualityRequired,
          fmt("%d/100 runs inside [%.1f, %.1f]; extremes [%.3f, %.3f], mean |H|/|G| %.3f",
              good, kQualityLo, kQualityHi, lo, hi, ratio)};
}

Outcome hfs_exactness() {
  double worst = 0.0, worst_center = 0.0;
  auto centering = [&](const HfsSolution& s) {
    const double fn = s.f.norm();
    worst_center = std::max(worst_center, fn > 0.0 ? std::abs(s.f.sum()) / fn : 0.0);
  };
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 30 + 5 * seed;
    const Graph g = random_connected(n, 3 * n, 400 + seed);
    std::mt19937_64 rng(seed);
    std::vector<NodeId> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<NodeId>(i);
    std::shuffle(ids.begin(), ids.end(), rng);
    std::vector<std::pair<NodeId, double>> labels;
    for (std::size_t i = 0; i < 4; ++i) labels.emplace_back(ids[i], i < 2 ? 1.0 : -1.0);
    const LabeledProblem p(n, labels, 1.0);

    HfsOptions dense;
    dense.solve.mode = SolveMode::kExactDense;
    const HfsSolution exact = stable_hfs(g, p, dense);
    std::vector<Edge> edges(g.edges().begin(), g.edges().end());
    StreamConfig cfg;
    cfg.resparsify.mode = SamplingMode::kPassthrough;
    cfg.batch_size = edges.size() / 3 + 1;
    const SparseHfsResult sparse = sparse_hfs(edges_from(edges), n, p, cfg);
    worst = std::max(worst, (sparse.solution.f - exact.f).lpNorm<Eigen::Infinity>());
    centering(exact);
    centering(sparse.solution);
    centering(stable_hfs(g, p));
  }
  return {worst <= kExactnessTol && worst_center <= kCenteringTol,
          fmt("max |f_pass - f_dense|_inf = %.2e, max |<f,1>|/|f| = %.2e over 20 graphs", worst,
              worst_center)};
}

Outcome hand_instance() {
  const std::vector<std::pair<NodeId, double>> labels{{0, 1.0}};
  const HfsSolution s = stable_hfs(unit_edge(), LabeledProblem(2, labels, 1.0));
  const double err =
      std::max({std::abs(s.mu - 0.4), std::abs(s.f[0] - 0.2), std::abs(s.f[1] + 0.2)});
  return {err <= kHandTol,
          fmt("mu = %.15f, f = (%.15f, %.15f), max error %.1e", s.mu, s.f[0], s.f[1], err)};
}

Outcome calculator() {
  BoundInputs in;
  in.k = 1.0;
  in.l = 4;
  in.gamma = 1.0;
  in.epsilon = 0.5;
  in.spectra.lambda_1 = 2.0;
  const double pi = pi_term(1, 1);
  const double beta = beta_bound(in);
  in.epsilon = 0.0;
  in.spectra.lambda_n = 4.0;
  const double inflation0 = empirical_inflation(in);

  BoundInputs grid;
  grid.l = 4;
  grid.u = 100;
  grid.k = 1.0;
  grid.c = 2.0;
  grid.spectra = {10.0, 30.0};
  grid.empirical_rhat = 0.3;
  bool monotone = true;
  double last = -1.0;
  for (int i = 0; i <= 8; ++i) {
    grid.epsilon = 0.1 * i;
    const double total = generalization_bound(grid).total_rhs;
    monotone = monotone && total >= last;
    last = total;
  }
  const bool ok = std::abs(pi - 4.0 / 3.0) <= kCalculatorTol &&
                  std::abs(beta - 0.80474) <= kCalculatorTol && inflation0 == 0.0 && monotone;
  return {ok, fmt("pi(1,1) = %.6f, beta = %.6f, inflation(eps=0) = %g, monotone on eps grid: %s",
                  pi, beta, inflation0, monotone ? "yes" : "no")};
}

Outcome probe_vs_bound() {
  int within = 0, instances = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ClusterSpec spec = ClusterSpec::with_total(60);
    const Dataset d = generate_dataset(spec, seed);
    const Graph g = knn_graph(d.points, 20);
    BoundInputs in;
    in.l = 4;
    in.gamma = 1.0;
    in.k = 1.0;
    in.spectra = spectral_summary(g);
    if (!(stability_denominator(in) > 0.0)) continue;
    ++instances;
    const ProbeResult r = stability_probe(g, d.truth, 4, 1.0, 40, seed);
    const double bound = beta_bound(in);
    worst = std::max(worst, r.beta_hat / bound);
    within += r.beta_hat <= bound ? 1 : 0;
  }
  return {instances == 20 && within >= kProbeRequired,
          fmt("%d/%d clustered k-NN instances (n=60, k=20, l=4) with beta_hat <= bound; "
              "max beta_hat/bound %.3f",
              within, instances, worst)};
}

struct SweepOutcome {
  Outcome knee, agreement, ratio, memory;
  double seconds = 0.0;
};

SweepOutcome desk_sweep() {
  ExperimentConfig cfg;
  cfg.out_dir = std::filesystem::current_path() / "acceptance_sweep";
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<SweepRow> rows = run_sweep(cfg);
  SweepOutcome out;
  out.seconds = seconds_since(t0);
  const bool in_budget = out.seconds < kSweepBudgetSec;

  std::string errors;
  for (const SweepRow& r : rows) {
    std::printf("    k=%-4zu m=%-7zu comps=%zu acc_stable=%.3f acc_sparse=%.3f R_stable=%.3f "
                "R_sparse=%.3f |H|/|G|=%.3f rounds=%zu %s\n",
                r.k, r.m, r.components, r.accuracy_stable, r.accuracy_sparse, r.risk_stable,
                r.risk_sparse, r.edge_ratio, r.rounds, r.error.c_str());
    if (!r.error.empty()) errors += " k=" + std::to_string(r.k) + ": " + r.error;
  }
  if (!errors.empty()) {
    const Outcome bad{false, "sweep errors:" + errors};
    return {bad, bad, bad, bad, out.seconds};
  }

  // Knee: the first connected k; "beyond" means every k from there on.
  const SweepRow& smallest = rows.front();
  std::size_t knee = rows.size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].components == 1) {
      knee = i;
      break;
    }
  }
  bool high = knee < rows.size();
  double min_after = 1.0;
  for (std::size_t i = knee; i < rows.size(); ++i) {
    min_after = std::min({min_after, rows[i].accuracy_stable, rows[i].accuracy_sparse});
    high = high && rows[i].accuracy_stable > kKneeHigh && rows[i].accuracy_sparse > kKneeHigh;
  }
  const bool low = smallest.accuracy_stable < kKneeLow && smallest.accuracy_sparse < kKneeLow;
  out.knee = {low && high && in_budget,
              fmt("smallest k=%zu acc %.3f/%.3f (< %.1f); knee at k=%zu, min acc beyond %.3f "
                  "(> %.1f required); %.1fs",
                  smallest.k, smallest.accuracy_stable, smallest.accuracy_sparse, kKneeLow,
                  knee < rows.size() ? rows[knee].k : 0, min_after, kKneeHigh, out.seconds)};

  const SweepRow* best = &rows.front();
  for (const SweepRow& r : rows) {
    if (r.accuracy_stable > best->accuracy_stable) best = &r;
  }
  const double gap = std::abs(best->accuracy_sparse - best->accuracy_stable);
  out.agreement = {gap <= kSparseGap && in_budget,
                   fmt("best k=%zu: acc_stable %.3f, acc_sparse %.3f, gap %.3f (<= %.2f)",
                       best->k, best->accuracy_stable, best->accuracy_sparse, gap, kSparseGap)};

  const SweepRow* dense = nullptr;
  for (const SweepRow& r : rows) {
    if (r.rounds > 1 || r.edge_ratio < 1.0) dense = &r;
  }
  if (dense == nullptr) {
    out.ratio = {false, "resparsification never reduced the graph"};
    out.memory = {false, "no resparsified run"};
    return out;
  }
  out.ratio = {dense->edge_ratio <= kEdgeRatioMax && in_budget,
               fmt("densest resparsified k=%zu: |H|/|G| = %.3f (<= %.2f), %zu rounds of %zu",
                   dense->k, dense->edge_ratio, kEdgeRatioMax, dense->rounds, dense->batch_size)};
  const SweepRow& last = rows.back();
  out.memory = {last.error.empty() && last.peak_retained > 0,
                fmt("k=%zu: peak retained %zu, min headroom below |H| + batch_size: %zu",
                    last.k, last.peak_retained, last.min_headroom)};
  return out;
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const char* name, const Outcome& o) {
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  };
  auto timed = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    o.detail += fmt(" [%.1fs]", seconds_since(t0));
    report(id, name, o);
  };

  timed(1, "Foster identity", foster_identity);
  timed(2, "resistance sketch bracket", sketch_bracket);
  timed(3, "sparsifier unbiasedness", unbiasedness);
  timed(4, "sparsifier quality", sparsifier_quality);
  timed(5, "HFS exactness", hfs_exactness);
  timed(6, "hand-verified instance", hand_instance);
  timed(7, "bound calculator", calculator);
  timed(8, "stability probe vs bound", probe_vs_bound);

  SweepOutcome sweep;
  try {
    sweep = desk_sweep();
  } catch (const std::exception& ex) {
    const Outcome bad{false, std::string("exception: ") + ex.what()};
    sweep = {bad, bad, bad, bad, 0.0};
  }
  report(9, "desk-scale sweep (a) accuracy knee", sweep.knee);
  report(9, "desk-scale sweep (b) sparse vs stable at best k", sweep.agreement);
  report(9, "desk-scale sweep (c) edge ratio at densest k", sweep.ratio);
  report(10, "memory contract", sweep.memory);

  std::printf("%d criterion line(s) failed\n", failed);
  return failed;
}
