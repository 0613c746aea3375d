#include "lswmkc/graph_learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "lswmkc/errors.hpp"

namespace lswmkc {

namespace {

constexpr double kSumTol = 1e-12;
constexpr int kMaxRootSteps = 100;
// Gap below which two sorted targets are treated as tied at the c-th
// neighbor boundary.
constexpr double kTieGap = 1e-12;

void check_dims(const KernelSet& kernels, const KernelWeights& weights, const KernelMatrix& kstar) {
  if (weights.size() != kernels.num_kernels()) {
    throw DimensionError("weight count does not match kernel count");
  }
  if (kstar.size() != kernels.num_samples()) {
    throw DimensionError("neighborhood kernel size does not match the kernel set");
  }
}

}  // namespace

AffinityGraph::AffinityGraph(Matrix values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols()) throw DimensionError("affinity graph must be square");
  if (!values_.allFinite()) throw InputError("affinity graph has non-finite entries");
  const Index n = values_.rows();
  for (Index i = 0; i < n; ++i) {
    if (values_(i, i) != 0.0) {
      std::ostringstream msg;
      msg << "affinity graph row " << i << " has nonzero diagonal " << values_(i, i);
      throw InputError(msg.str());
    }
    if ((values_.row(i).array() < 0.0).any()) {
      std::ostringstream msg;
      msg << "affinity graph row " << i << " has negative entries";
      throw InputError(msg.str());
    }
    const double s = values_.row(i).sum();
    if (std::abs(s - 1.0) > kRowSumTol) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "affinity graph row " << i << " sums to " << s;
      throw InputError(msg.str());
    }
  }
}

Index AffinityGraph::row_support(Index i, double threshold) const {
  return (values_.row(i).array() > threshold).count();
}

GammaVector::GammaVector(Vector gamma) : gamma_(std::move(gamma)) {
  if (!gamma_.allFinite()) throw InputError("gamma has non-finite entries");
  for (Index i = 0; i < gamma_.size(); ++i) {
    if (!(gamma_(i) > 0.0)) {
      std::ostringstream msg;
      msg << "gamma_" << i << " = " << gamma_(i) << " must be positive";
      throw InputError(msg.str());
    }
  }
}

RowTarget assemble_row_target(Index i, const KernelSet& kernels, const KernelWeights& weights,
                              const KernelMatrix& kstar, double alpha) {
  check_dims(kernels, weights, kstar);
  if (!(alpha >= 0.0)) throw ParameterError("alpha must be nonnegative");
  const Index n = kernels.num_samples();
  if (i < 0 || i >= n) throw DimensionError("row index out of range");

  RowTarget target{i, Vector(n)};
  for (Index j = 0; j < n; ++j) {
    double acc = 2.0 * alpha * kstar(i, j);
    for (Index p = 0; p < kernels.num_kernels(); ++p) acc += weights[p] * kernels[p](i, j);
    target.e(j) = -acc;
  }
  return target;
}

SimplexProjection project_row_simplex(const Vector& zhat, Index self_index) {
  const Index n = zhat.size();
  if (n < 2) throw InputError("simplex projection needs at least two entries");
  if (self_index < 0 || self_index >= n) throw DimensionError("self index out of range");
  if (!zhat.allFinite()) throw InputError("projection input has non-finite entries");

  double top = -std::numeric_limits<double>::infinity();
  for (Index j = 0; j < n; ++j) {
    if (j != self_index) top = std::max(top, zhat(j));
  }

  // f(b) = sum_{j != self} max(zhat_j + b, 0) - 1 is convex, nondecreasing and
  // piecewise linear; f(lo) = -1 and f(hi) >= 0.
  double lo = -top;
  double hi = 1.0 - top;
  auto evaluate = [&](double b, Index& active, double& active_sum) {
    active = 0;
    active_sum = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (j == self_index) continue;
      if (zhat(j) + b > 0.0) {
        ++active;
        active_sum += zhat(j);
      }
    }
    return active_sum + static_cast<double>(active) * b - 1.0;
  };

  // Newton from the right of the root stays right of it, so the active set
  // only shrinks; the step lands on the root once the set stops changing.
  double beta = hi;
  Index active = 0;
  double active_sum = 0.0;
  double f = evaluate(beta, active, active_sum);
  int steps = 0;
  for (; steps < kMaxRootSteps; ++steps) {
    if (f >= 0.0) {
      hi = std::min(hi, beta);
    } else {
      lo = std::max(lo, beta);
    }
    if (std::abs(f) <= kSumTol && active > 0) break;

    double next;
    if (active > 0) {
      next = (1.0 - active_sum) / static_cast<double>(active);
      if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
    } else {
      next = 0.5 * (lo + hi);
    }
    const Index prev_active = active;
    beta = next;
    f = evaluate(beta, active, active_sum);
    if (active == prev_active && active > 0 && f >= -kSumTol) {
      ++steps;
      break;
    }
  }
  if (active == 0) {
    throw NumericalError("simplex projection root finding ended with an empty support");
  }
  // Re-derive beta from the final support so the row sums to one up to rounding.
  beta = (1.0 - active_sum) / static_cast<double>(active);

  SimplexProjection out{Vector::Zero(n), beta, steps};
  for (Index j = 0; j < n; ++j) {
    if (j == self_index) continue;
    out.z(j) = std::max(zhat(j) + beta, 0.0);
  }
  return out;
}

Vector update_row_from_target(const RowTarget& target, double alpha, double gamma_i) {
  const double denom = 2.0 * (alpha + gamma_i);
  if (!(alpha + gamma_i > 0.0)) {
    std::ostringstream msg;
    msg << "row " << target.owner << ": alpha + gamma_i = " << alpha + gamma_i
        << " must be positive";
    throw ParameterError(msg.str());
  }
  const Vector zhat = -target.e / denom;
  return project_row_simplex(zhat, target.owner).z;
}

Vector update_row(Index i, const KernelSet& kernels, const KernelWeights& weights,
                  const KernelMatrix& kstar, double alpha, double gamma_i) {
  return update_row_from_target(assemble_row_target(i, kernels, weights, kstar, alpha), alpha,
                                gamma_i);
}

GraphInit init_graph_and_gamma(const KernelSet& kernels, Index neighbors) {
  const Index n = kernels.num_samples();
  const Index c = neighbors;
  if (c < 1 || c > n - 2) {
    std::ostringstream msg;
    msg << "neighbor count c = " << c << " must lie in [1, " << n - 2 << "] for n = " << n;
    throw ParameterError(msg.str());
  }
  const KernelWeights uniform = KernelWeights::uniform(kernels.num_kernels());

  Matrix z = Matrix::Zero(n, n);
  Vector gamma(n);
  std::size_t degenerate = 0;
  std::vector<Index> order(static_cast<size_t>(n - 1));
  Vector e(n);

  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      double acc = 0.0;
      for (Index p = 0; p < kernels.num_kernels(); ++p) acc += uniform[p] * kernels[p](i, j);
      e(j) = -acc;
    }
    // The self entry never occupies a neighbor slot.
    Index pos = 0;
    for (Index j = 0; j < n; ++j) {
      if (j != i) order[static_cast<size_t>(pos++)] = j;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return e(a) < e(b); });

    double head_sum = 0.0;
    for (Index r = 0; r < c; ++r) head_sum += e(order[static_cast<size_t>(r)]);
    const double boundary = e(order[static_cast<size_t>(c)]);
    const double last_kept = e(order[static_cast<size_t>(c - 1)]);
    const double denom = static_cast<double>(c) * boundary - head_sum;

    const double g = 0.5 * denom;
    if (denom < kTieGap || boundary - last_kept < kTieGap) {
      ++degenerate;
      for (Index r = 0; r < c; ++r) z(i, order[static_cast<size_t>(r)]) = 1.0 / static_cast<double>(c);
    } else {
      for (Index r = 0; r < c; ++r) {
        const Index j = order[static_cast<size_t>(r)];
        z(i, j) = (boundary - e(j)) / denom;
      }
    }
    gamma(i) = std::max(g, GammaVector::kFloor);
  }
  return GraphInit{AffinityGraph(std::move(z)), GammaVector(std::move(gamma)), degenerate};
}

}  // namespace lswmkc
