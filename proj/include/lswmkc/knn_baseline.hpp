#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lswmkc/kernel_kmeans.hpp"
#include "lswmkc/kernel_ops.hpp"

namespace lswmkc {

using MaskMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

// Row i marks the round(tau * n) samples most similar to sample i.
struct NeighborMask {
  MaskMatrix mask;
  double tau = 1.0;
  Index per_row = 0;

  bool is_full() const;
};

// Neighbor count for ratio tau over n samples; throws ParameterError when tau
// is outside (0, 1] or the count rounds to zero.
Index neighbor_count(double tau, Index n);

// Ties in similarity are broken by ascending sample index.
NeighborMask build_neighbor_mask(const KernelMatrix& reference, double tau);

// Entrywise product N .* K_p. The result is generally not symmetric.
Matrix localize_kernel(const KernelMatrix& kernel, const NeighborMask& mask);

// Average of the localized kernels, symmetrized and clipped to PSD. A full
// mask returns average_kernel(kernels) untouched.
KernelMatrix localized_average(const KernelSet& kernels, const NeighborMask& mask);

struct TauReport {
  double tau = 0.0;
  Index per_row = 0;
  std::optional<double> acc;
  double spectral_mass = 0.0;  // sum of top-k eigenvalues / trace
};

struct KnnResult {
  KMeansResult clustering;
  double best_tau = 0.0;
  std::size_t best_index = 0;
  std::vector<TauReport> report;
};

// 0.1, 0.2, ..., 0.9.
std::vector<double> default_tau_grid();

// Masks on the uniform average kernel, localizes each base kernel and runs
// kernel k-means per tau. Picks the best tau by accuracy when `opts.kmeans.truth`
// is set, otherwise by spectral mass.
KnnResult knn_baseline_cluster(const KernelSet& kernels, int k, const std::vector<double>& tau_grid,
                               const KkmOptions& opts);

}  // namespace lswmkc
