#include "lswmkc/knn_baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lswmkc/errors.hpp"
#include "lswmkc/linalg.hpp"
#include "lswmkc/metrics.hpp"

namespace lswmkc {

bool NeighborMask::is_full() const { return (mask.array() == 1).all(); }

Index neighbor_count(double tau, Index n) {
  if (!(tau > 0.0 && tau <= 1.0)) {
    std::ostringstream msg;
    msg << "neighbor ratio tau = " << tau << " must lie in (0, 1]";
    throw ParameterError(msg.str());
  }
  const auto count = static_cast<Index>(std::llround(tau * static_cast<double>(n)));
  if (count < 1) {
    std::ostringstream msg;
    msg << "neighbor ratio tau = " << tau << " selects no neighbors for n = " << n;
    throw ParameterError(msg.str());
  }
  return std::min(count, n);
}

NeighborMask build_neighbor_mask(const KernelMatrix& reference, double tau) {
  const Index n = reference.size();
  NeighborMask out{MaskMatrix::Zero(n, n), tau, neighbor_count(tau, n)};
  std::vector<Index> order(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      return reference(i, a) > reference(i, b);
    });
    for (Index r = 0; r < out.per_row; ++r) out.mask(i, order[static_cast<size_t>(r)]) = 1;
  }
  return out;
}

Matrix localize_kernel(const KernelMatrix& kernel, const NeighborMask& mask) {
  if (mask.mask.rows() != kernel.size() || mask.mask.cols() != kernel.size()) {
    throw DimensionError("neighbor mask and kernel differ in size");
  }
  return kernel.values().cwiseProduct(mask.mask.cast<double>());
}

KernelMatrix localized_average(const KernelSet& kernels, const NeighborMask& mask) {
  if (mask.is_full()) return average_kernel(kernels);
  const Index n = kernels.num_samples();
  Matrix sum = Matrix::Zero(n, n);
  for (const auto& k : kernels) sum += localize_kernel(k, mask);
  sum /= static_cast<double>(kernels.num_kernels());
  return KernelMatrix(nearest_psd(sum));
}

std::vector<double> default_tau_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 9; ++i) grid.push_back(static_cast<double>(i) / 10.0);
  return grid;
}

KnnResult knn_baseline_cluster(const KernelSet& kernels, int k,
                               const std::vector<double>& tau_grid, const KkmOptions& opts) {
  if (tau_grid.empty()) throw ParameterError("tau grid must not be empty");
  const KernelMatrix reference = average_kernel(kernels);
  const ClusterAssignment* truth = opts.kmeans.truth;

  KnnResult result;
  for (std::size_t t = 0; t < tau_grid.size(); ++t) {
    const NeighborMask mask = build_neighbor_mask(reference, tau_grid[t]);
    const KernelMatrix localized = localized_average(kernels, mask);
    KMeansResult clustering = kkm_cluster(localized, k, opts);

    TauReport entry;
    entry.tau = tau_grid[t];
    entry.per_row = mask.per_row;
    const double trace = localized.values().trace();
    const Vector ev = symmetric_eigenvalues(localized.values());
    const double top = ev.tail(k).sum();
    entry.spectral_mass = trace > 0.0 ? top / trace : 0.0;
    if (truth != nullptr) entry.acc = accuracy(clustering.assignment, *truth);

    bool better = t == 0;
    if (!better) {
      const TauReport& best = result.report[result.best_index];
      better = truth != nullptr ? *entry.acc > *best.acc : entry.spectral_mass > best.spectral_mass;
    }
    if (better) {
      result.best_index = t;
      result.best_tau = entry.tau;
      result.clustering = std::move(clustering);
    }
    result.report.push_back(entry);
  }
  return result;
}

}  // namespace lswmkc
