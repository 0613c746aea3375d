#include "lswmkc/kernel_kmeans.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "lswmkc/errors.hpp"
#include "lswmkc/linalg.hpp"
#include "lswmkc/metrics.hpp"
#include "lswmkc/random.hpp"
#include "parallel.hpp"

namespace lswmkc {

namespace {

constexpr double kDegenerateTrace = 1e-14;

void check_k(int k, Index n) {
  if (k < 1 || k > n) {
    std::ostringstream msg;
    msg << "cluster count k = " << k << " must lie in [1, " << n << "]";
    throw ParameterError(msg.str());
  }
}

int nearest_centroid(const Matrix& points, Index i, const Matrix& centroids, double& dist) {
  int best = 0;
  dist = std::numeric_limits<double>::infinity();
  for (Index c = 0; c < centroids.rows(); ++c) {
    const double d = (points.row(i) - centroids.row(c)).squaredNorm();
    if (d < dist) {
      dist = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

}  // namespace

PartitionMatrix kkm_partition(const KernelMatrix& kernel, int k, bool normalize_rows) {
  const Index n = kernel.size();
  check_k(k, n);
  const auto eig = symmetric_eigen(kernel.values());

  PartitionMatrix out{Matrix(n, k), Vector(k)};
  for (int c = 0; c < k; ++c) {
    const Index src = n - 1 - c;
    Vector v = eig.eigenvectors.col(src);
    Index arg = 0;
    for (Index i = 1; i < n; ++i) {
      if (std::abs(v(i)) > std::abs(v(arg))) arg = i;
    }
    if (v(arg) < 0.0) v = -v;
    out.h.col(c) = v;
    out.eigenvalues(c) = eig.eigenvalues(src);
  }
  if (normalize_rows) {
    for (Index i = 0; i < n; ++i) {
      const double norm = out.h.row(i).norm();
      if (norm > 0.0) out.h.row(i) /= norm;
    }
  }
  return out;
}

Matrix kmeanspp_seed(const Matrix& points, int k, std::uint64_t rng_seed) {
  const Index n = points.rows();
  check_k(k, n);
  Rng rng(rng_seed);
  Matrix centroids(k, points.cols());
  centroids.row(0) = points.row(static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n))));

  Vector d2(n);
  for (Index i = 0; i < n; ++i) d2(i) = (points.row(i) - centroids.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Index pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double run = 0.0;
      pick = n - 1;
      for (Index i = 0; i < n; ++i) {
        run += d2(i);
        if (run > target && d2(i) > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    }
    centroids.row(c) = points.row(pick);
    for (Index i = 0; i < n; ++i) {
      d2(i) = std::min(d2(i), (points.row(i) - centroids.row(c)).squaredNorm());
    }
  }
  return centroids;
}

LloydRun lloyd(const Matrix& points, Matrix centroids, int max_iter) {
  const Index n = points.rows();
  const auto k = static_cast<int>(centroids.rows());
  LloydRun run;
  run.labels.assign(static_cast<size_t>(n), -1);
  std::vector<int> next(static_cast<size_t>(n));

  for (int it = 0; it < max_iter; ++it) {
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
      double d = 0.0;
      next[static_cast<size_t>(i)] = nearest_centroid(points, i, centroids, d);
      total += d;
    }
    run.wcss_trace.push_back(total);
    run.iterations = it + 1;
    const bool stable = next == run.labels;
    run.labels = next;
    if (stable) break;

    Matrix sums = Matrix::Zero(k, points.cols());
    std::vector<Index> counts(static_cast<size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      const int c = run.labels[static_cast<size_t>(i)];
      sums.row(c) += points.row(i);
      ++counts[static_cast<size_t>(c)];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<size_t>(c)] > 0) {
        centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<size_t>(c)]);
      }
    }
  }
  run.centroids = std::move(centroids);
  return run;
}

double wcss(const Matrix& points, const std::vector<int>& labels, int k) {
  Matrix sums = Matrix::Zero(k, points.cols());
  std::vector<Index> counts(static_cast<size_t>(k), 0);
  for (Index i = 0; i < points.rows(); ++i) {
    sums.row(labels[static_cast<size_t>(i)]) += points.row(i);
    ++counts[static_cast<size_t>(labels[static_cast<size_t>(i)])];
  }
  for (int c = 0; c < k; ++c) {
    if (counts[static_cast<size_t>(c)] > 0) sums.row(c) /= static_cast<double>(counts[static_cast<size_t>(c)]);
  }
  double total = 0.0;
  for (Index i = 0; i < points.rows(); ++i) {
    total += (points.row(i) - sums.row(labels[static_cast<size_t>(i)])).squaredNorm();
  }
  return total;
}

KMeansResult kmeans(const Matrix& points, int k, const KMeansOptions& opts) {
  const Index n = points.rows();
  check_k(k, n);
  if (opts.restarts < 1) throw ParameterError("k-means needs at least one restart");
  if (opts.truth != nullptr && opts.truth->size() != static_cast<size_t>(n)) {
    throw DimensionError("k-means reference labels do not match the point count");
  }

  const auto restarts = static_cast<size_t>(opts.restarts);
  std::vector<std::vector<int>> labels(restarts);
  std::vector<double> scores(restarts);
  detail::parallel_for(restarts, opts.threads, [&](std::size_t r) {
    const Matrix init = kmeanspp_seed(points, k, derive_seed(opts.seed, r));
    LloydRun run = lloyd(points, init, opts.max_iter);
    scores[r] = wcss(points, run.labels, k);
    labels[r] = std::move(run.labels);
  });

  KMeansResult result;
  result.restart_wcss = scores;
  for (size_t r = 1; r < restarts; ++r) {
    if (scores[r] < scores[static_cast<size_t>(result.best_wcss_restart)]) {
      result.best_wcss_restart = static_cast<int>(r);
    }
  }
  std::size_t chosen = static_cast<size_t>(result.best_wcss_restart);
  if (opts.truth != nullptr) {
    result.restart_acc.resize(restarts);
    for (size_t r = 0; r < restarts; ++r) {
      result.restart_acc[r] = accuracy(ClusterAssignment(labels[r], k), *opts.truth);
    }
    chosen = 0;
    for (size_t r = 1; r < restarts; ++r) {
      const double a = result.restart_acc[r];
      const double b = result.restart_acc[chosen];
      if (a > b || (a == b && scores[r] < scores[chosen])) chosen = r;
    }
  }
  result.selected_restart = static_cast<int>(chosen);
  result.wcss = scores[chosen];
  result.assignment = ClusterAssignment(std::move(labels[chosen]), k);
  return result;
}

KMeansResult kkm_cluster(const KernelMatrix& kernel, int k, const KkmOptions& opts) {
  const PartitionMatrix part = kkm_partition(kernel, k, opts.normalize_rows);
  return kmeans(part.h, k, opts.kmeans);
}

MkkmResult mkkm(const KernelSet& kernels, int k, const KkmOptions& opts, int max_iter,
                double rel_tol) {
  if (max_iter < 1) throw ParameterError("mkkm max_iter must be >= 1");
  const Index m = kernels.num_kernels();
  MkkmResult result;
  result.weights = Vector::Constant(m, 1.0 / static_cast<double>(m));

  std::vector<double> traces(static_cast<size_t>(m));
  for (Index p = 0; p < m; ++p) traces[static_cast<size_t>(p)] = kernels[p].values().trace();

  for (int it = 1; it <= max_iter; ++it) {
    const KernelMatrix combined = combine_weighted(kernels, result.weights, /*squared=*/true);
    const PartitionMatrix part = kkm_partition(combined, k);
    const double obj = combined.values().trace() - part.eigenvalues.sum();
    result.objective.push_back(obj);
    result.iterations = it;

    // a_p = Tr(K_p) - Tr(H^T K_p H)
    Vector inv(m);
    for (Index p = 0; p < m; ++p) {
      const double captured = (part.h.transpose() * kernels[p].values() * part.h).trace();
      const double a = traces[static_cast<size_t>(p)] - captured;
      if (a <= kDegenerateTrace) {
        std::ostringstream msg;
        msg << "mkkm: kernel " << p << " has residual trace " << a << " <= 1e-14";
        throw DegenerateError(msg.str());
      }
      inv(p) = 1.0 / a;
    }
    result.weights = inv / inv.sum();

    if (it > 1) {
      const double prev = result.objective[result.objective.size() - 2];
      if (std::abs(obj - prev) / std::max(std::abs(prev), 1.0) < rel_tol) {
        result.converged = true;
        break;
      }
    }
  }
  const KernelMatrix combined = combine_weighted(kernels, result.weights, /*squared=*/true);
  result.clustering = kkm_cluster(combined, k, opts);
  return result;
}

KMeansResult avg_kkm(const KernelSet& kernels, int k, const KkmOptions& opts) {
  return kkm_cluster(average_kernel(kernels), k, opts);
}

}  // namespace lswmkc
