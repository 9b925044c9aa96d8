#pragma once

#include "sparsehfs/graph.hpp"
#include "sparsehfs/io.hpp"
#include "sparsehfs/problem.hpp"
#include "sparsehfs/sdd_solve.hpp"
#include "sparsehfs/sparsify.hpp"

namespace shfs {

enum class StabilizerMode {
  // f = Q^{-1}(y - mu 1), mu = 1^T Q^{-1} y / 1^T Q^{-1} 1; <f, 1> = 0.
  kLagrangian,
  // f = Q^{-1} y - mu 1 with the same mu; does not center f in general.
  kLiteral,
};

struct HfsOptions {
  SolveOptions solve{};
  StabilizerMode stabilizer = StabilizerMode::kLagrangian;
  // Pseudoinverse semantics on disconnected graphs: components without a
  // labeled node get f = 0. Off by default; disconnected graphs are rejected.
  bool allow_disconnected = false;
};

// (gamma l L + I_S)^{-1} y
Vector hfs_unconstrained(const Graph& g, const LabeledProblem& p,
                         const HfsOptions& opts = {});

HfsSolution stable_hfs(const Graph& g, const LabeledProblem& p,
                       const HfsOptions& opts = {});

struct SparseHfsResult {
  HfsSolution solution;
  StreamResult stream;
};

// Streams edges into a sparsifier and solves stable HFS on it.
SparseHfsResult sparse_hfs(const EdgeSource& stream, std::size_t n,
                           const LabeledProblem& p, const StreamConfig& cfg,
                           const HfsOptions& opts = {});

struct RiskReport {
  double empirical = 0.0;       // mean squared loss over S
  double generalization = 0.0;  // mean squared loss over T
  double accuracy = 0.0;        // sign agreement over T; sign(0) is wrong
};

RiskReport evaluate_risks(const Vector& f, const Vector& truth,
                          const LabeledProblem& p);
inline RiskReport evaluate_risks(const HfsSolution& sol, const Vector& truth,
                                 const LabeledProblem& p) {
  return evaluate_risks(sol.f, truth, p);
}

// Mean squared loss of f against truth over the labeled set.
double empirical_risk(const Vector& f, const Vector& truth,
                      const LabeledProblem& p);

}  // namespace shfs
