#include "lswmkc/linalg.hpp"

#include <sstream>

#include "lswmkc/errors.hpp"
#include "lswmkc/kernel_ops.hpp"

namespace lswmkc {

namespace {

void require_square(const Matrix& a) {
  if (a.rows() != a.cols()) {
    std::ostringstream msg;
    msg << "eigendecomposition needs a square matrix, got " << a.rows() << "x" << a.cols();
    throw DimensionError(msg.str());
  }
}

[[noreturn]] void fail(const Eigen::ComputationInfo info, Index n) {
  std::ostringstream msg;
  msg << "symmetric eigensolver failed on " << n << "x" << n << " matrix (info=" << info
      << ", max sweeps " << Eigen::SelfAdjointEigenSolver<Matrix>::m_maxIterations << "*n)";
  throw NumericalError(msg.str());
}

}  // namespace

SymmetricEigen symmetric_eigen(const Matrix& a) {
  require_square(a);
  if (!a.allFinite()) throw InputError("eigendecomposition input has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) fail(solver.info(), a.rows());
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Vector symmetric_eigenvalues(const Matrix& a) {
  require_square(a);
  if (!a.allFinite()) throw InputError("eigendecomposition input has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) fail(solver.info(), a.rows());
  return solver.eigenvalues();
}

Matrix nearest_psd(const Matrix& a) {
  const Matrix sym = symmetrize(a);
  const auto eig = symmetric_eigen(sym);
  const Vector clipped = eig.eigenvalues.cwiseMax(0.0);
  const Matrix out = eig.eigenvectors * clipped.asDiagonal() * eig.eigenvectors.transpose();
  return symmetrize(out);
}

}  // namespace lswmkc
