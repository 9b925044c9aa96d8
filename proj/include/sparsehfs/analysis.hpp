#pragma once

#include <cstddef>
#include <cstdint>

#include "sparsehfs/graph.hpp"
#include "sparsehfs/hfs.hpp"
#include "sparsehfs/problem.hpp"

namespace shfs {

struct SpectralSummary {
  double lambda_1 = 0.0;  // Fiedler value
  double lambda_n = 0.0;  // largest Laplacian eigenvalue
};

// Exact dense eigenvalues; throws DisconnectedGraphError when lambda_1 = 0.
SpectralSummary spectral_summary(const Graph& g,
                                 std::size_t dense_cap = kDefaultDenseCap);

// Conservative lambda_1 for G when only an eps-sparsifier H is at hand.
SpectralSummary spectral_summary_from_sparsifier(
    const Graph& h, double epsilon, std::size_t dense_cap = kDefaultDenseCap);

struct BoundInputs {
  std::size_t l = 1;
  std::size_t u = 1;
  double gamma = 1.0;
  double epsilon = 0.0;
  double k = 1.0;      // |y(x)| <= k
  double c = 1.0;      // |f(x) - y(x)| <= c
  double delta = 0.1;
  SpectralSummary spectra{};
  double empirical_rhat = 0.0;  // R-hat of the exact stable-HFS solution
};

struct BoundReport {
  double pi = 0.0;
  double beta = 0.0;
  double empirical_inflation = 0.0;
  double slack = 0.0;  // sqrt(pi ln(1/delta) / 2)
  double total_rhs = 0.0;
};

// pi(l, u) = lu / (l + u - 0.5) * 1 / (1 - 1 / (2 max(l, u)))
double pi_term(std::size_t l, std::size_t u);

// l gamma (1 - eps) lambda_1 - 1; every bound term divides by it.
double stability_denominator(const BoundInputs& in);

// 1.5 k sqrt(l) / D^2 + sqrt(2) k / D. Throws ValidationError("stability
// bound inapplicable") unless D > 0.
double beta_bound(const BoundInputs& in);

// l^2 gamma^2 lambda_n^2 k^2 eps^2 / D^4
double empirical_inflation(const BoundInputs& in);

BoundReport generalization_bound(const BoundInputs& in);

// Largest eigenvalue of (P_F Q P_F)^{-1} on F = 1^perp for
// Q = gamma l L + I_S; dense.
double restricted_inverse_norm(const Graph& g, const LabeledProblem& p,
                               std::size_t dense_cap = kDefaultDenseCap);

enum class ProbeMode {
  kSampled,
  // Every labeled set of size l and every single swap; n <= 12, l <= 3 only.
  kExhaustive,
};

struct ProbeResult {
  double beta_hat = 0.0;
  double max_loss = 0.0;  // largest |f(x) - y(x)| seen, for comparison with c
  double max_gap = 0.0;   // largest ||f - f'||_2 over the evaluated pairs
  std::size_t pairs = 0;  // partition pairs evaluated
};

// Empirical uniform stability: the max over (S, S') pairs differing in one
// swapped point of max_x |(f(x)-y(x))^2 - (f'(x)-y(x))^2|, f from stable
// HFS.
ProbeResult stability_probe(const Graph& g, const Vector& truth,
                            std::size_t l, double gamma, std::size_t trials,
                            std::uint64_t seed,
                            ProbeMode mode = ProbeMode::kSampled,
                            const HfsOptions& opts = {});

// Loss change between two solutions, max over all nodes.
double loss_difference(const Vector& f, const Vector& f_prime,
                       const Vector& truth);

// R-hat(f_H) - R-hat(f_G), both from stable HFS.
double empirical_error_gap(const Graph& g, const Graph& h,
                           const LabeledProblem& p,
                           const HfsOptions& opts = {});

}  // namespace shfs
