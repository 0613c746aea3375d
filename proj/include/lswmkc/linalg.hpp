#pragma once

#include "lswmkc/types.hpp"

namespace lswmkc {

// Eigenpairs of a symmetric matrix, eigenvalues in ascending order.
struct SymmetricEigen {
  Vector eigenvalues;
  Matrix eigenvectors;  // column j pairs with eigenvalues(j)
};

// Full decomposition of the symmetric matrix `a` (only the lower triangle is
// read). Throws NumericalError if the QR iteration does not converge.
SymmetricEigen symmetric_eigen(const Matrix& a);

Vector symmetric_eigenvalues(const Matrix& a);

// Frobenius-nearest symmetric PSD matrix to (a + a^T)/2: U max(S, 0) U^T.
Matrix nearest_psd(const Matrix& a);

}  // namespace lswmkc
