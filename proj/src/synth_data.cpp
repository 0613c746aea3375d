#include "lswmkc/synth_data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "lswmkc/errors.hpp"
#include "lswmkc/random.hpp"

namespace lswmkc {

namespace {

double median_pairwise_distance(const Matrix& x) {
  std::vector<double> d;
  d.reserve(static_cast<size_t>(x.rows() * (x.rows() - 1) / 2));
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = i + 1; j < x.rows(); ++j) d.push_back((x.row(i) - x.row(j)).norm());
  }
  if (d.empty()) return 1.0;
  const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  return *mid > 0.0 ? *mid : 1.0;
}

}  // namespace

void SyntheticSpec::validate() const {
  std::ostringstream msg;
  if (per_cluster < 1 || clusters < 1 || dims < 1 || kernels < 1) {
    msg << "synthetic dataset counts must be positive";
  } else if (dims < clusters) {
    msg << "dims = " << dims << " must be >= clusters = " << clusters;
  } else if (noise_kernels < 0 || noise_kernels > kernels) {
    msg << "noise_kernels = " << noise_kernels << " must lie in [0, " << kernels << "]";
  } else if (!(separation > 0.0) || !(perturbation >= 0.0)) {
    msg << "separation must be positive and perturbation nonnegative";
  } else if (per_cluster * clusters < 2) {
    msg << "need at least two samples";
  } else {
    return;
  }
  throw ParameterError(msg.str());
}

SyntheticDataset generate(const SyntheticSpec& spec) {
  spec.validate();
  const Index n = static_cast<Index>(spec.per_cluster) * spec.clusters;
  Rng rng(derive_seed(spec.seed, 0));

  Matrix features(n, spec.dims);
  std::vector<int> labels(static_cast<size_t>(n));
  const double offset = spec.separation / std::sqrt(2.0);
  for (Index i = 0; i < n; ++i) {
    const int q = static_cast<int>(i / spec.per_cluster);
    labels[static_cast<size_t>(i)] = q;
    for (Index d = 0; d < spec.dims; ++d) {
      features(i, d) = rng.normal() + (d == q ? offset : 0.0);
    }
  }

  std::vector<KernelMatrix> kernels;
  const int informative = spec.kernels - spec.noise_kernels;
  for (int p = 0; p < spec.kernels; ++p) {
    Rng view_rng(derive_seed(spec.seed, static_cast<std::uint64_t>(p) + 1));
    Matrix view = features;
    if (p >= informative) {
      std::vector<Index> perm(static_cast<size_t>(n));
      std::iota(perm.begin(), perm.end(), Index{0});
      view_rng.shuffle(perm.begin(), perm.end());
      for (Index i = 0; i < n; ++i) view.row(i) = features.row(perm[static_cast<size_t>(i)]);
    }
    for (Index i = 0; i < n; ++i) {
      for (Index d = 0; d < spec.dims; ++d) view(i, d) += spec.perturbation * view_rng.normal();
    }
    const double factor = std::exp2(static_cast<double>(p % 4) / 2.0 - 0.5);
    const double bandwidth = median_pairwise_distance(view) * factor;
    kernels.push_back(preprocess_kernel(gaussian_kernel(view, bandwidth)));
  }
  return {KernelSet(std::move(kernels)), ClusterAssignment(std::move(labels), spec.clusters),
          std::move(features)};
}

}  // namespace lswmkc
