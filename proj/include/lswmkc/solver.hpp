#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lswmkc/assignment.hpp"
#include "lswmkc/graph_learning.hpp"
#include "lswmkc/kernel_kmeans.hpp"
#include "lswmkc/kernel_ops.hpp"

namespace lswmkc {

struct SolverConfig {
  double alpha = 1.0;
  Index neighbors = 5;
  int clusters = 2;
  int max_iter = 50;
  double rel_tol = 1e-6;
  std::uint64_t seed = 0;
  unsigned threads = 1;  // row sweep fan-out; 0 = hardware concurrency

  // Throws ParameterError unless max_iter >= 1, rel_tol > 0, alpha >= 0,
  // 1 <= neighbors <= n - 2 and 2 <= clusters <= n.
  void validate(Index n) const;
};

struct SolverState {
  KernelWeights omega;
  AffinityGraph graph;
  KernelMatrix kstar;
  GammaVector gamma;
  double initial_objective = 0.0;
  std::vector<double> objective_trace;  // one entry per full sweep
  int iterations = 0;
  bool converged = false;
};

// Closed-form weight step: w_p = max(d_p, 0) / |max(d, 0)|, d_p = Tr(K_p Z^T).
KernelWeights update_weights(const KernelSet& kernels, const AffinityGraph& graph);

AffinityGraph update_graph(const KernelSet& kernels, const KernelWeights& weights,
                           const KernelMatrix& kstar, double alpha, const GammaVector& gamma,
                           unsigned threads = 1);

// Frobenius-nearest symmetric PSD matrix to Z.
KernelMatrix update_neighborhood_kernel(const AffinityGraph& graph);
KernelMatrix update_neighborhood_kernel(const Matrix& z);

// -Tr(sum_p w_p K_p Z^T) + sum_i gamma_i |Z_i|^2 + alpha |K* - Z|_F^2.
// Takes raw matrices so infeasible Z can be evaluated.
double objective(const KernelSet& kernels, const KernelWeights& weights, const Matrix& z,
                 const KernelMatrix& kstar, double alpha, const GammaVector& gamma);

// Block-coordinate descent over (w, Z, K*), updated in that order each sweep.
// Stops when |f_t - f_{t-1}| / max(|f_{t-1}|, 1) < rel_tol or after max_iter
// sweeps; the latter leaves `converged` false.
SolverState solve(const KernelSet& kernels, const SolverConfig& cfg);

struct AlphaReport {
  double alpha = 0.0;
  double final_objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::optional<double> acc;  // when labels were supplied
  std::optional<double> wcss;
};

struct GridSearchResult {
  std::size_t best_index = 0;
  std::vector<SolverState> states;
  std::vector<AlphaReport> report;
  std::optional<KMeansResult> best_clustering;  // when labels were supplied
};

// 2^0, 2^1, ..., 2^10.
std::vector<double> default_alpha_grid();

// Solves once per alpha. With labels, picks the alpha whose K* yields the best
// kernel k-means accuracy (ties keep the earlier alpha); otherwise the lowest
// final objective.
GridSearchResult grid_search_alpha(const KernelSet& kernels, const SolverConfig& base,
                                   const std::vector<double>& alphas,
                                   const ClusterAssignment* labels = nullptr,
                                   const KkmOptions& kkm = {});

}  // namespace lswmkc
