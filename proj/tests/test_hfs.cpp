#include <doctest.h>

#include <cmath>
#include <random>

#include "sparsehfs/error.hpp"
#include "sparsehfs/hfs.hpp"
#include "test_util.hpp"

using namespace shfs;
using namespace shfs::testing;

namespace {

using Labels = std::vector<std::pair<NodeId, double>>;

// f = Q^{-1}(y - mu 1) through an explicit dense inverse.
struct DenseStable {
  Vector f;
  double mu;
};

DenseStable dense_stable(const Graph& g, const LabeledProblem& p) {
  const DenseMatrix q = p.gamma() * static_cast<double>(p.l()) * dense_laplacian(g) +
                        DenseMatrix(p.indicator().asDiagonal());
  const DenseMatrix inv = q.inverse();
  const Vector ones = Vector::Ones(q.rows());
  const double mu = ones.dot(inv * p.y()) / ones.dot(inv * ones);
  return {inv * (p.y() - mu * ones), mu};
}

LabeledProblem random_labels(std::size_t n, std::size_t l, double gamma,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<NodeId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<NodeId>(i);
  std::shuffle(ids.begin(), ids.end(), rng);
  Labels labels;
  for (std::size_t i = 0; i < l; ++i) labels.emplace_back(ids[i], i % 2 == 0 ? 1.0 : -1.0);
  return LabeledProblem(n, labels, gamma);
}

// Two dense blocks of `half` nodes joined by a few bridges; truth +1 / -1.
Graph two_clusters(std::size_t half, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution in(0.3);
  std::vector<Edge> edges;
  for (std::size_t b = 0; b < 2; ++b) {
    const auto off = static_cast<NodeId>(b * half);
    for (NodeId i = 0; i < half; ++i) {
      edges.push_back({off + i, off + static_cast<NodeId>((i + 1) % half), 1.0});
      for (NodeId j = i + 2; j < half; ++j) {
        if (in(rng)) edges.push_back({off + i, off + j, 1.0});
      }
    }
  }
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(half - 1));
  for (int i = 0; i < 3; ++i) {
    edges.push_back({pick(rng), static_cast<NodeId>(half) + pick(rng), 1.0});
  }
  return build_graph(edges, 2 * half);
}

}  // namespace

TEST_CASE("unconstrained HFS on the 2-node instance") {
  const Labels labels{{0, 1.0}};
  const LabeledProblem p(2, labels, 1.0);
  const Vector f = hfs_unconstrained(unit_edge(), p);
  CHECK(f[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f[1] == doctest::Approx(1.0).epsilon(1e-12));

  const Labels zero{{0, 0.0}};
  CHECK(hfs_unconstrained(unit_edge(), LabeledProblem(2, zero, 1.0, 1.0)).norm() == 0.0);

  const Vector big = hfs_unconstrained(unit_edge(), LabeledProblem(2, labels, 1e9));
  CHECK(std::abs(big[0] - big[1]) < 1e-6);
}

TEST_CASE("stable HFS on the 2-node instance") {
  const Labels labels{{0, 1.0}};
  const LabeledProblem p(2, labels, 1.0);
  const HfsSolution sol = stable_hfs(unit_edge(), p);
  CHECK(std::abs(sol.mu - 0.4) <= 1e-12);
  CHECK(std::abs(sol.f[0] - 0.2) <= 1e-12);
  CHECK(std::abs(sol.f[1] + 0.2) <= 1e-12);
  const DenseStable oracle = dense_stable(unit_edge(), p);
  CHECK(std::abs(oracle.mu - 0.4) <= 1e-12);
  CHECK((oracle.f - sol.f).lpNorm<Eigen::Infinity>() <= 1e-12);

  const Labels zero{{0, 0.0}};
  const HfsSolution z = stable_hfs(unit_edge(), LabeledProblem(2, zero, 1.0, 1.0));
  CHECK(z.mu == 0.0);
  CHECK(z.f.norm() == 0.0);
}

TEST_CASE("antisymmetric path instance") {
  const Labels labels{{0, 1.0}, {2, -1.0}};
  const HfsSolution sol = stable_hfs(path(3), LabeledProblem(3, labels, 1.0));
  CHECK(std::abs(sol.f[1]) < 1e-12);
  CHECK(sol.f[0] == doctest::Approx(-sol.f[2]));
  CHECK(sol.f[0] > 0.0);
}

TEST_CASE("stable HFS matches the dense inverse and satisfies KKT") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 15 + seed;
    const Graph g = random_connected(n, 2 * n, seed);
    const LabeledProblem p = random_labels(n, 2 + seed % 4, 0.5 + 0.1 * seed, seed);
    const HfsSolution sol = stable_hfs(g, p);
    const DenseStable oracle = dense_stable(g, p);
    CHECK((sol.f - oracle.f).lpNorm<Eigen::Infinity>() <= 1e-8);
    CHECK(sol.mu == doctest::Approx(oracle.mu).epsilon(1e-8));
    // Constraint and stationarity: <f,1> = 0 and Q f = y - mu 1.
    CHECK(std::abs(sol.f.sum()) <= 1e-8 * sol.f.norm());
    const DenseMatrix q = p.gamma() * static_cast<double>(p.l()) * dense_laplacian(g) +
                          DenseMatrix(p.indicator().asDiagonal());
    const Vector rhs = p.y() - sol.mu * Vector::Ones(static_cast<Eigen::Index>(n));
    CHECK((q * sol.f - rhs).norm() <= 1e-8 * rhs.norm());
    CHECK(sol.residual <= 1e-8);
  }
}

TEST_CASE("literal stabilizer subtracts mu after the solve") {
  const Graph g = random_connected(12, 20, 4);
  const LabeledProblem p = random_labels(12, 3, 1.0, 4);
  HfsOptions opts;
  opts.stabilizer = StabilizerMode::kLiteral;
  const HfsSolution lit = stable_hfs(g, p, opts);
  const Vector fhat = hfs_unconstrained(g, p);
  const DenseStable oracle = dense_stable(g, p);
  CHECK(lit.mu == doctest::Approx(oracle.mu));
  CHECK((lit.f - (fhat.array() - oracle.mu).matrix()).lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("disconnected graphs") {
  const Graph g = build_graph(std::vector<Edge>{{0, 1, 1.0}, {2, 3, 1.0}}, 4);
  const Labels labels{{0, 1.0}};
  const LabeledProblem p(4, labels, 1.0);
  CHECK_THROWS_AS(stable_hfs(g, p), DisconnectedGraphError);
  HfsOptions opts;
  opts.allow_disconnected = true;
  const HfsSolution sol = stable_hfs(g, p, opts);
  CHECK(sol.f[2] == 0.0);
  CHECK(sol.f[3] == 0.0);
  // The labeled component behaves like the 2-node instance.
  CHECK(sol.f[0] == doctest::Approx(0.2));
  CHECK(sol.f[1] == doctest::Approx(-0.2));
}

TEST_CASE("labeled problem preconditions") {
  CHECK_THROWS_AS(LabeledProblem(3, Labels{}, 1.0), ValidationError);
  CHECK_THROWS_AS(LabeledProblem(3, Labels{{0, 1.0}}, 0.0), ValidationError);
  CHECK_THROWS_AS(LabeledProblem(3, Labels{{3, 1.0}}, 1.0), ValidationError);
  CHECK_THROWS_AS(LabeledProblem(3, Labels{{1, 1.0}, {1, -1.0}}, 1.0), ValidationError);
  CHECK_THROWS_AS(LabeledProblem(3, Labels{{1, 2.0}}, 1.0, 1.0), ValidationError);
  const LabeledProblem p(4, Labels{{2, 1.0}, {0, -1.0}}, 1.0);
  CHECK(p.labeled() == std::vector<NodeId>{0, 2});
  CHECK(p.l() == 2);
  CHECK(p.u() == 2);
  CHECK(p.label_bound() == 1.0);
  const Vector truth = Vector::Ones(4);
  const LabeledProblem q = p.swapped(2, 3, truth);
  CHECK(q.labeled() == std::vector<NodeId>{0, 3});
  CHECK(q.y()[2] == 0.0);
  CHECK_THROWS_AS(p.swapped(1, 3, truth), ValidationError);
}

TEST_CASE("risk reports") {
  const Labels labels{{0, 1.0}};
  const LabeledProblem p(2, labels, 1.0);
  Vector truth(2);
  truth << 1.0, -1.0;
  Vector f(2);
  f << 0.2, -0.2;
  const RiskReport r = evaluate_risks(f, truth, p);
  CHECK(r.generalization == doctest::Approx(0.64));
  CHECK(r.empirical == doctest::Approx(0.64));
  CHECK(r.accuracy == 1.0);

  const RiskReport exact = evaluate_risks(truth, truth, p);
  CHECK(exact.empirical == 0.0);
  CHECK(exact.generalization == 0.0);
  CHECK(exact.accuracy == 1.0);

  const RiskReport flipped = evaluate_risks(Vector(-truth), truth, p);
  CHECK(flipped.generalization == 4.0);
  CHECK(flipped.accuracy == 0.0);

  CHECK(evaluate_risks(Vector::Zero(2), truth, p).accuracy == 0.0);
  const LabeledProblem all(2, Labels{{0, 1.0}, {1, -1.0}}, 1.0);
  CHECK_THROWS_AS(evaluate_risks(f, truth, all), ValidationError);
}

TEST_CASE("sparse HFS in passthrough mode equals stable HFS") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = random_connected(40, 80, 100 + seed);
    const LabeledProblem p = random_labels(40, 4, 1.0, seed);
    std::vector<Edge> edges(g.edges().begin(), g.edges().end());
    StreamConfig cfg;
    cfg.resparsify.mode = SamplingMode::kPassthrough;
    cfg.batch_size = 25;
    const SparseHfsResult res = sparse_hfs(edges_from(edges), 40, p, cfg);
    const HfsSolution exact = stable_hfs(g, p);
    CHECK(res.solution.graph_used == GraphUsed::kExact);
    CHECK((res.solution.f - exact.f).lpNorm<Eigen::Infinity>() <= 1e-8);
  }
}

TEST_CASE("per-round trace when recomputing each batch") {
  const Graph g = random_connected(30, 60, 3);
  const LabeledProblem p = random_labels(30, 4, 1.0, 3);
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  StreamConfig cfg;
  cfg.resparsify.mode = SamplingMode::kPassthrough;
  cfg.batch_size = 30;
  cfg.recompute_each_batch = true;
  const SparseHfsResult res = sparse_hfs(edges_from(edges), 30, p, cfg);
  CHECK(res.stream.trace.size() == res.stream.rounds.size());
  CHECK((res.stream.trace.back().f - res.solution.f).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("sparse HFS sign pattern on a two-cluster graph") {
  Vector truth = Vector::Ones(200);
  truth.tail(100).setConstant(-1.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = two_clusters(100, seed);
    REQUIRE(is_connected(g));
    const Labels labels{{static_cast<NodeId>(seed % 100), 1.0},
                        {static_cast<NodeId>(100 + (seed * 7) % 100), -1.0}};
    const LabeledProblem p(200, labels, 1.0);
    std::vector<Edge> edges(g.edges().begin(), g.edges().end());
    std::shuffle(edges.begin(), edges.end(), std::mt19937_64(seed));
    StreamConfig cfg;
    cfg.epsilon = 0.5;
    cfg.seed = seed;
    cfg.batch_size = 600;
    const SparseHfsResult res = sparse_hfs(edges_from(edges), 200, p, cfg);
    CHECK(res.solution.graph_used == GraphUsed::kSparsified);
    const HfsSolution exact = stable_hfs(g, p);
    int agree = 0;
    for (Eigen::Index i = 0; i < 200; ++i) {
      agree += (res.solution.f[i] > 0) == (exact.f[i] > 0) ? 1 : 0;
    }
    CHECK(agree >= 190);
  }
}
