#include "lswmkc/solver.hpp"

#include <cmath>
#include <sstream>

#include "lswmkc/errors.hpp"
#include "lswmkc/linalg.hpp"
#include "lswmkc/logging.hpp"
#include "lswmkc/metrics.hpp"
#include "parallel.hpp"

namespace lswmkc {

namespace {

constexpr double kAlignmentFloor = 1e-14;

// sum_ij a_ij b_ij, accumulated row by row in fixed order.
double frobenius_inner(const Matrix& a, const Matrix& b) {
  double total = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    double row = 0.0;
    for (Index j = 0; j < a.cols(); ++j) row += a(i, j) * b(i, j);
    total += row;
  }
  return total;
}

}  // namespace

void SolverConfig::validate(Index n) const {
  std::ostringstream msg;
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    msg << "alpha = " << alpha << " must be a finite nonnegative number";
  } else if (max_iter < 1) {
    msg << "max_iter = " << max_iter << " must be >= 1";
  } else if (!(rel_tol > 0.0)) {
    msg << "rel_tol = " << rel_tol << " must be positive";
  } else if (neighbors < 1 || neighbors > n - 2) {
    msg << "neighbors = " << neighbors << " must lie in [1, " << n - 2 << "]";
  } else if (clusters < 2 || clusters > n) {
    msg << "clusters = " << clusters << " must lie in [2, " << n << "]";
  } else {
    return;
  }
  throw ParameterError(msg.str());
}

KernelWeights update_weights(const KernelSet& kernels, const AffinityGraph& graph) {
  if (graph.size() != kernels.num_samples()) {
    throw DimensionError("affinity graph size does not match the kernel set");
  }
  const Index m = kernels.num_kernels();
  Vector delta(m);
  for (Index p = 0; p < m; ++p) {
    // Tr(K_p Z^T) = sum_ij K_p[i,j] Z[i,j]; negative alignments are infeasible
    // directions under w >= 0 and drop out.
    delta(p) = std::max(frobenius_inner(kernels[p].values(), graph.values()), 0.0);
  }
  if ((delta.array().abs() < kAlignmentFloor).all()) {
    throw DegenerateError("all kernel alignments Tr(K_p Z^T) are nonpositive or vanish");
  }
  return KernelWeights(delta / delta.norm());
}

AffinityGraph update_graph(const KernelSet& kernels, const KernelWeights& weights,
                           const KernelMatrix& kstar, double alpha, const GammaVector& gamma,
                           unsigned threads) {
  const Index n = kernels.num_samples();
  if (gamma.size() != n) throw DimensionError("gamma length does not match the kernel set");
  Matrix z(n, n);
  detail::parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t row) {
    const auto i = static_cast<Index>(row);
    z.row(i) = update_row(i, kernels, weights, kstar, alpha, gamma[i]).transpose();
  });
  return AffinityGraph(std::move(z));
}

KernelMatrix update_neighborhood_kernel(const Matrix& z) {
  if (!z.allFinite()) throw InputError("affinity graph has non-finite entries");
  return KernelMatrix(nearest_psd(z));
}

KernelMatrix update_neighborhood_kernel(const AffinityGraph& graph) {
  return update_neighborhood_kernel(graph.values());
}

double objective(const KernelSet& kernels, const KernelWeights& weights, const Matrix& z,
                 const KernelMatrix& kstar, double alpha, const GammaVector& gamma) {
  const Index n = kernels.num_samples();
  if (weights.size() != kernels.num_kernels() || z.rows() != n || z.cols() != n ||
      kstar.size() != n || gamma.size() != n) {
    throw DimensionError("objective arguments disagree in size");
  }
  double alignment = 0.0;
  for (Index p = 0; p < kernels.num_kernels(); ++p) {
    alignment += weights[p] * frobenius_inner(kernels[p].values(), z);
  }
  double regularizer = 0.0;
  for (Index i = 0; i < n; ++i) regularizer += gamma[i] * z.row(i).squaredNorm();
  const double fit = (kstar.values() - z).squaredNorm();
  return -alignment + regularizer + alpha * fit;
}

SolverState solve(const KernelSet& kernels, const SolverConfig& cfg) {
  const Index n = kernels.num_samples();
  cfg.validate(n);

  SolverState state;
  state.omega = KernelWeights::uniform(kernels.num_kernels());
  state.kstar = combine_weighted(kernels, state.omega, /*squared=*/false);
  auto init = init_graph_and_gamma(kernels, cfg.neighbors);
  if (init.degenerate_rows > 0) {
    log::info("initialization: " + std::to_string(init.degenerate_rows) +
              " rows fell back to uniform neighbor weights");
  }
  state.graph = std::move(init.graph);
  state.gamma = std::move(init.gamma);
  state.initial_objective =
      objective(kernels, state.omega, state.graph.values(), state.kstar, cfg.alpha, state.gamma);

  double previous = state.initial_objective;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    state.omega = update_weights(kernels, state.graph);
    state.graph = update_graph(kernels, state.omega, state.kstar, cfg.alpha, state.gamma,
                               cfg.threads);
    state.kstar = update_neighborhood_kernel(state.graph);

    const double current =
        objective(kernels, state.omega, state.graph.values(), state.kstar, cfg.alpha, state.gamma);
    state.objective_trace.push_back(current);
    state.iterations = it;
    log::debug("iteration " + std::to_string(it) + " objective " + std::to_string(current));

    const double change = std::abs(current - previous) / std::max(std::abs(previous), 1.0);
    previous = current;
    if (change < cfg.rel_tol) {
      state.converged = true;
      break;
    }
  }
  return state;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int e = 0; e <= 10; ++e) grid.push_back(std::ldexp(1.0, e));
  return grid;
}

GridSearchResult grid_search_alpha(const KernelSet& kernels, const SolverConfig& base,
                                   const std::vector<double>& alphas,
                                   const ClusterAssignment* labels, const KkmOptions& kkm) {
  if (alphas.empty()) throw ParameterError("alpha grid must not be empty");
  GridSearchResult result;
  std::optional<double> best_acc;
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    SolverConfig cfg = base;
    cfg.alpha = alphas[a];
    SolverState state = solve(kernels, cfg);

    AlphaReport entry;
    entry.alpha = alphas[a];
    entry.final_objective = state.objective_trace.empty() ? state.initial_objective
                                                          : state.objective_trace.back();
    entry.iterations = state.iterations;
    entry.converged = state.converged;

    if (labels != nullptr) {
      KkmOptions opts = kkm;
      opts.kmeans.truth = labels;
      KMeansResult clustering = kkm_cluster(state.kstar, cfg.clusters, opts);
      const double acc = accuracy(clustering.assignment, *labels);
      entry.acc = acc;
      entry.wcss = clustering.wcss;
      if (!best_acc || acc > *best_acc) {
        best_acc = acc;
        result.best_index = a;
        result.best_clustering = std::move(clustering);
      }
    } else if (a == 0 || entry.final_objective < result.report[result.best_index].final_objective) {
      result.best_index = a;
    }
    result.report.push_back(entry);
    result.states.push_back(std::move(state));
  }
  return result;
}

}  // namespace lswmkc
