#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lswmkc/assignment.hpp"
#include "lswmkc/kernel_ops.hpp"
#include "lswmkc/types.hpp"

namespace lswmkc {

// n x k matrix with orthonormal columns: the top-k eigenvectors of a kernel.
struct PartitionMatrix {
  Matrix h;
  Vector eigenvalues;  // descending, paired with the columns of h
};

struct KMeansOptions {
  int restarts = 50;
  std::uint64_t seed = 0;
  int max_iter = 300;
  // When set, the reported restart is the one with the best accuracy against
  // these labels (ties by lower WCSS); otherwise the lowest-WCSS restart.
  const ClusterAssignment* truth = nullptr;
  unsigned threads = 1;
};

struct LloydRun {
  std::vector<int> labels;
  Matrix centroids;
  std::vector<double> wcss_trace;  // WCSS after each assignment step
  int iterations = 0;
};

struct KMeansResult {
  ClusterAssignment assignment;
  double wcss = 0.0;
  int selected_restart = 0;
  int best_wcss_restart = 0;
  std::vector<double> restart_wcss;
  std::vector<double> restart_acc;  // filled only when truth labels were given
};

// Top-k eigenvectors of K in descending eigenvalue order. Each column's
// largest-magnitude entry is made positive. Optional row normalization.
PartitionMatrix kkm_partition(const KernelMatrix& kernel, int k, bool normalize_rows = false);

// k-means++ seeding on rows of `points`, drawn from `rng_seed`.
Matrix kmeanspp_seed(const Matrix& points, int k, std::uint64_t rng_seed);

// Lloyd iterations from the given centroids until labels stop changing.
// Empty clusters keep their previous centroid.
LloydRun lloyd(const Matrix& points, Matrix centroids, int max_iter);

double wcss(const Matrix& points, const std::vector<int>& labels, int k);

// Multi-restart k-means on rows of `points`. Restart r uses the stream
// derive_seed(seed, r), so results do not depend on scheduling.
KMeansResult kmeans(const Matrix& points, int k, const KMeansOptions& opts);

struct KkmOptions {
  KMeansOptions kmeans;
  bool normalize_rows = false;
};

KMeansResult kkm_cluster(const KernelMatrix& kernel, int k, const KkmOptions& opts);

struct MkkmResult {
  KMeansResult clustering;
  Vector weights;                 // simplex weights, sum to 1
  std::vector<double> objective;  // Tr(K_w (I - H H^T)) after each H update
  int iterations = 0;
  bool converged = false;
};

// Alternates H <- top-k eigenvectors of sum w_p^2 K_p and
// w_p <- (1/a_p) / sum_q (1/a_q), a_p = Tr(K_p (I - H H^T)).
MkkmResult mkkm(const KernelSet& kernels, int k, const KkmOptions& opts, int max_iter = 50,
                double rel_tol = 1e-6);

KMeansResult avg_kkm(const KernelSet& kernels, int k, const KkmOptions& opts);

}  // namespace lswmkc
