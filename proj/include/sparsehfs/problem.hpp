#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "sparsehfs/graph.hpp"

namespace shfs {

// Inputs of the Laplacian-regularized least-squares problem: labels y (zero
// off the labeled set S), the labeled set itself and the regularizer gamma.
class LabeledProblem {
 public:
  // label_bound <= 0 means "use max |y_i|".
  LabeledProblem(std::size_t n,
                 std::span<const std::pair<NodeId, double>> labels,
                 double gamma, double label_bound = 0.0);

  std::size_t n() const { return static_cast<std::size_t>(y_.size()); }
  std::size_t l() const { return labeled_.size(); }
  std::size_t u() const { return n() - l(); }
  const Vector& y() const { return y_; }
  // Sorted labeled node ids.
  const std::vector<NodeId>& labeled() const { return labeled_; }
  bool is_labeled(NodeId i) const { return indicator_[i] > 0.0; }
  // Diagonal of I_S.
  const Vector& indicator() const { return indicator_; }
  double gamma() const { return gamma_; }
  double label_bound() const { return label_bound_; }

  // Same problem with one labeled node swapped for an unlabeled one, whose
  // label is read from truth.
  LabeledProblem swapped(NodeId leaving, NodeId joining,
                         const Vector& truth) const;

 private:
  Vector y_;
  Vector indicator_;
  std::vector<NodeId> labeled_;
  double gamma_;
  double label_bound_;
};

enum class GraphUsed { kExact, kSparsified };

struct HfsSolution {
  Vector f;
  double mu = 0.0;
  GraphUsed graph_used = GraphUsed::kExact;
  double residual = 0.0;  // ||Q f - (y - mu 1)|| / ||y - mu 1||
};

}  // namespace shfs
