#include "lswmkc/kernel_ops.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "lswmkc/errors.hpp"
#include "lswmkc/linalg.hpp"

namespace lswmkc {

KernelMatrix::KernelMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols()) {
    std::ostringstream msg;
    msg << "kernel matrix must be square, got " << values_.rows() << "x" << values_.cols();
    throw DimensionError(msg.str());
  }
  if (!values_.allFinite()) throw InputError("kernel matrix has non-finite entries");
  const Index n = values_.rows();
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      if (std::abs(values_(i, j) - values_(j, i)) > kSymmetryTol) {
        std::ostringstream msg;
        msg << "kernel matrix is not symmetric at (" << i << "," << j << "): " << values_(i, j)
            << " vs " << values_(j, i);
        throw InputError(msg.str());
      }
    }
  }
}

KernelSet::KernelSet(std::vector<KernelMatrix> kernels) : kernels_(std::move(kernels)) {
  if (kernels_.empty()) throw InputError("kernel set must hold at least one kernel");
  const Index n = kernels_.front().size();
  for (size_t p = 1; p < kernels_.size(); ++p) {
    if (kernels_[p].size() != n) {
      std::ostringstream msg;
      msg << "kernel " << p << " has " << kernels_[p].size() << " samples, expected " << n;
      throw DimensionError(msg.str());
    }
  }
}

KernelWeights::KernelWeights(Vector omega) : omega_(std::move(omega)) {
  if (omega_.size() == 0) throw InputError("kernel weights must be non-empty");
  if (!omega_.allFinite()) throw InputError("kernel weights have non-finite entries");
  if ((omega_.array() < 0.0).any()) throw InputError("kernel weights must be nonnegative");
  const double norm2 = omega_.squaredNorm();
  if (std::abs(norm2 - 1.0) > kNormTol) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "kernel weights must have unit squared norm, got " << norm2;
    throw InputError(msg.str());
  }
}

KernelWeights KernelWeights::uniform(Index m) {
  if (m < 1) throw ParameterError("uniform weights need m >= 1");
  return KernelWeights(Vector::Constant(m, std::sqrt(1.0 / static_cast<double>(m))));
}

KernelMatrix gaussian_kernel(const Matrix& features, double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw ParameterError("gaussian bandwidth must be positive and finite");
  }
  if (!features.allFinite()) throw InputError("features have non-finite entries");
  const Index n = features.rows();
  const double scale = 1.0 / (2.0 * bandwidth * bandwidth);
  Matrix k(n, n);
  for (Index i = 0; i < n; ++i) {
    k(i, i) = 1.0;
    for (Index j = i + 1; j < n; ++j) {
      const double d2 = (features.row(i) - features.row(j)).squaredNorm();
      k(i, j) = k(j, i) = std::exp(-d2 * scale);
    }
  }
  return KernelMatrix(std::move(k));
}

Matrix symmetrize(const Matrix& a) {
  Matrix s = a;
  const Index n = a.rows();
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return s;
}

KernelMatrix preprocess_kernel(const KernelMatrix& kernel) {
  const Index n = kernel.size();
  if (n == 0) throw InputError("cannot preprocess an empty kernel");
  const Matrix k = symmetrize(kernel.values());
  const double inv_n = 1.0 / static_cast<double>(n);

  // K_c = K - r 1^T - 1 r^T + t, r = row means, t = grand mean.
  Vector row_mean(n);
  for (Index i = 0; i < n; ++i) row_mean(i) = k.row(i).sum() * inv_n;
  const double grand_mean = row_mean.sum() * inv_n;

  // Upper triangle computed once and mirrored, so the result is exactly symmetric.
  Matrix centered(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i <= j; ++i) {
      centered(i, j) = centered(j, i) = k(i, j) - row_mean(i) - row_mean(j) + grand_mean;
    }
  }

  Vector diag = centered.diagonal();
  for (Index i = 0; i < n; ++i) {
    if (diag(i) <= 1e-14) {
      std::ostringstream msg;
      msg << "degenerate sample " << i << ": centered self-similarity " << diag(i)
          << " (sample coincides with the mean embedding)";
      throw DegenerateError(msg.str());
    }
  }

  Matrix normalized(n, n);
  for (Index j = 0; j < n; ++j) {
    normalized(j, j) = 1.0;
    for (Index i = 0; i < j; ++i) {
      normalized(i, j) = normalized(j, i) = centered(i, j) / std::sqrt(diag(i) * diag(j));
    }
  }
  return KernelMatrix(std::move(normalized));
}

KernelMatrix combine_weighted(const KernelSet& kernels, const Vector& weights, bool squared) {
  if (weights.size() != kernels.num_kernels()) {
    std::ostringstream msg;
    msg << "weight count " << weights.size() << " does not match kernel count "
        << kernels.num_kernels();
    throw DimensionError(msg.str());
  }
  const Index n = kernels.num_samples();
  Matrix out = Matrix::Zero(n, n);
  for (Index p = 0; p < kernels.num_kernels(); ++p) {
    const double w = squared ? weights(p) * weights(p) : weights(p);
    out.noalias() += w * kernels[p].values();
  }
  return KernelMatrix(std::move(out));
}

KernelMatrix combine_weighted(const KernelSet& kernels, const KernelWeights& weights,
                              bool squared) {
  return combine_weighted(kernels, weights.values(), squared);
}

KernelMatrix average_kernel(const KernelSet& kernels) {
  const Index n = kernels.num_samples();
  Matrix out = Matrix::Zero(n, n);
  for (const auto& k : kernels) out += k.values();
  out /= static_cast<double>(kernels.num_kernels());
  return KernelMatrix(std::move(out));
}

PsdReport check_psd(const KernelMatrix& kernel, double tol) {
  PsdReport report;
  if (kernel.size() == 0) {
    report.is_psd = true;
    return report;
  }
  const Vector ev = symmetric_eigenvalues(kernel.values());
  report.min_eigenvalue = ev.minCoeff();
  report.is_psd = report.min_eigenvalue >= -tol;
  return report;
}

}  // namespace lswmkc
