#pragma once

#include <span>
#include <vector>

#include "lswmkc/types.hpp"

namespace lswmkc {

// Dense symmetric n x n similarity matrix.
//
// Construction validates that the matrix is square, finite and symmetric
// within kSymmetryTol. Values are immutable afterwards.
class KernelMatrix {
 public:
  static constexpr double kSymmetryTol = 1e-12;

  KernelMatrix() = default;
  explicit KernelMatrix(Matrix values);

  Index size() const { return values_.rows(); }
  const Matrix& values() const { return values_; }
  double operator()(Index i, Index j) const { return values_(i, j); }

 private:
  Matrix values_;
};

// Ordered collection of m >= 1 base kernels over the same n samples.
class KernelSet {
 public:
  KernelSet() = default;
  explicit KernelSet(std::vector<KernelMatrix> kernels);

  Index num_kernels() const { return static_cast<Index>(kernels_.size()); }
  Index num_samples() const { return kernels_.empty() ? 0 : kernels_.front().size(); }
  const KernelMatrix& operator[](Index p) const { return kernels_[static_cast<size_t>(p)]; }
  const std::vector<KernelMatrix>& kernels() const { return kernels_; }

  auto begin() const { return kernels_.begin(); }
  auto end() const { return kernels_.end(); }

 private:
  std::vector<KernelMatrix> kernels_;
};

// Nonnegative kernel weights with unit squared-l2 norm.
class KernelWeights {
 public:
  static constexpr double kNormTol = 1e-12;

  KernelWeights() = default;
  // Validates omega >= 0 and |sum omega^2 - 1| <= kNormTol.
  explicit KernelWeights(Vector omega);

  // omega_p = sqrt(1/m) for every p.
  static KernelWeights uniform(Index m);

  Index size() const { return omega_.size(); }
  const Vector& values() const { return omega_; }
  double operator[](Index p) const { return omega_(p); }

 private:
  Vector omega_;
};

struct PsdReport {
  bool is_psd = false;
  double min_eigenvalue = 0.0;
};

// K[i,j] = exp(-|x_i - x_j|^2 / (2 bandwidth^2)); rows of `features` are samples.
KernelMatrix gaussian_kernel(const Matrix& features, double bandwidth);

// Centers the kernel in feature space, then scales it to unit diagonal.
// Throws DegenerateError naming the first sample whose centered
// self-similarity is <= 1e-14.
KernelMatrix preprocess_kernel(const KernelMatrix& kernel);

// sum_p w_p^e K_p with e = 2 when `squared`, else e = 1.
KernelMatrix combine_weighted(const KernelSet& kernels, const Vector& weights, bool squared);
KernelMatrix combine_weighted(const KernelSet& kernels, const KernelWeights& weights, bool squared);

// (1/m) sum_p K_p, accumulated in kernel order.
KernelMatrix average_kernel(const KernelSet& kernels);

PsdReport check_psd(const KernelMatrix& kernel, double tol);

// (A + A^T) / 2, exactly symmetric in floating point.
Matrix symmetrize(const Matrix& a);

}  // namespace lswmkc
