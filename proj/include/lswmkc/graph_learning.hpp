#pragma once

#include <cstddef>

#include "lswmkc/kernel_ops.hpp"
#include "lswmkc/types.hpp"

namespace lswmkc {

// n x n consensus affinity graph Z: nonnegative, zero diagonal, rows sum to 1.
class AffinityGraph {
 public:
  static constexpr double kRowSumTol = 1e-9;

  AffinityGraph() = default;
  // Validates the invariants above; throws InputError when violated.
  explicit AffinityGraph(Matrix values);

  Index size() const { return values_.rows(); }
  const Matrix& values() const { return values_; }
  double operator()(Index i, Index j) const { return values_(i, j); }

  // Number of entries in row i strictly greater than `threshold`.
  Index row_support(Index i, double threshold = 0.0) const;

 private:
  Matrix values_;
};

// Per-row regularization weights gamma_i > 0, fixed after initialization.
class GammaVector {
 public:
  static constexpr double kFloor = 1e-10;

  GammaVector() = default;
  explicit GammaVector(Vector gamma);

  Index size() const { return gamma_.size(); }
  const Vector& values() const { return gamma_; }
  double operator[](Index i) const { return gamma_(i); }

 private:
  Vector gamma_;
};

// e_i = -(2 alpha K*[i,:] + sum_p w_p K_p[i,:]) for one row.
struct RowTarget {
  Index owner = 0;
  Vector e;
};

struct SimplexProjection {
  Vector z;
  double shift = 0.0;  // beta in z = max(zhat + beta, 0)
  int newton_steps = 0;
};

RowTarget assemble_row_target(Index i, const KernelSet& kernels, const KernelWeights& weights,
                              const KernelMatrix& kstar, double alpha);

// Euclidean projection of `zhat` (with the self entry removed) onto the
// probability simplex: z_j = max(zhat_j + beta, 0), z_self = 0, sum z = 1.
// beta is the root of sum_{j != self} max(zhat_j + beta, 0) = 1, found by a
// Newton iteration safeguarded with bisection.
SimplexProjection project_row_simplex(const Vector& zhat, Index self_index);

// Exact minimizer of the row subproblem for fixed weights, K* and gamma_i.
Vector update_row(Index i, const KernelSet& kernels, const KernelWeights& weights,
                  const KernelMatrix& kstar, double alpha, double gamma_i);

// Same as above from an already assembled e_i.
Vector update_row_from_target(const RowTarget& target, double alpha, double gamma_i);

struct GraphInit {
  AffinityGraph graph;
  GammaVector gamma;
  std::size_t degenerate_rows = 0;  // rows that needed the uniform fallback
};

// c-sparse initial graph and the largest gamma_i keeping every row c-sparse,
// with uniform weights and alpha = 0.
GraphInit init_graph_and_gamma(const KernelSet& kernels, Index neighbors);

}  // namespace lswmkc
