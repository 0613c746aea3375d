#pragma once

#include <cstdint>

#include "lswmkc/assignment.hpp"
#include "lswmkc/kernel_ops.hpp"

namespace lswmkc {

struct SyntheticSpec {
  int per_cluster = 50;
  int clusters = 3;
  int dims = 3;             // must be >= clusters
  double separation = 6.0;  // centroid distance in units of the cluster std
  int kernels = 4;
  int noise_kernels = 0;    // <= kernels; placed after the informative ones
  std::uint64_t seed = 0;
  double perturbation = 0.3;  // std of the per-view feature jitter

  // Throws ParameterError on non-positive counts, dims < clusters,
  // noise_kernels > kernels or non-positive separation.
  void validate() const;
};

struct SyntheticDataset {
  KernelSet kernels;
  ClusterAssignment truth;
  Matrix features;  // n x dims, before per-view jitter
};

// Isotropic unit-variance Gaussian clusters with centroids at
// (separation / sqrt 2) * e_q, so every pair of centroids is `separation`
// apart. Informative view p: Gaussian kernel over the features plus
// independent N(0, perturbation^2) jitter, bandwidth = median pairwise
// distance * 2^(p mod 4 / 2 - 1/2). Noise view: the same construction over
// an independently row-permuted copy of the features. All kernels are
// preprocessed.
SyntheticDataset generate(const SyntheticSpec& spec);

}  // namespace lswmkc
