#include <doctest.h>

#include <cmath>

#include "lswmkc/errors.hpp"
#include "lswmkc/linalg.hpp"
#include "lswmkc/metrics.hpp"
#include "lswmkc/solver.hpp"
#include "test_support.hpp"

using namespace lswmkc;

namespace {

// Kernels K_p with Tr(K_p Z^T) = delta_p for Z the 2-cycle on 2 samples.
KernelSet kernels_with_alignment(const std::vector<double>& delta) {
  std::vector<KernelMatrix> ks;
  for (double d : delta) {
    Matrix k(2, 2);
    k << 1, d / 2, d / 2, 1;
    ks.emplace_back(k);
  }
  return KernelSet(std::move(ks));
}

AffinityGraph swap_graph() {
  Matrix z(2, 2);
  z << 0, 1, 1, 0;
  return AffinityGraph(z);
}

// Two-block kernel after centering and normalization: +1 within, -1 across.
KernelMatrix signed_blocks(Index a, Index b) {
  const Index n = a + b;
  Matrix k = -Matrix::Ones(n, n);
  k.topLeftCorner(a, a).setOnes();
  k.bottomRightCorner(b, b).setOnes();
  return KernelMatrix(k);
}

}  // namespace

TEST_CASE("update_weights examples") {
  SUBCASE("3-4-5") {
    const auto w = update_weights(kernels_with_alignment({3.0, 4.0}), swap_graph());
    CHECK(w[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(w[1] == doctest::Approx(0.8).epsilon(1e-15));
  }
  SUBCASE("equal alignments give uniform weights") {
    const auto w = update_weights(kernels_with_alignment({0.7, 0.7, 0.7}), swap_graph());
    for (Index p = 0; p < 3; ++p) CHECK(w[p] == doctest::Approx(std::sqrt(1.0 / 3)).epsilon(1e-15));
  }
  SUBCASE("single kernel") {
    const auto w = update_weights(kernels_with_alignment({0.3}), swap_graph());
    CHECK(w[0] == doctest::Approx(1.0));
  }
  SUBCASE("negative alignment is clamped") {
    const auto w = update_weights(kernels_with_alignment({-1.0, 2.0}), swap_graph());
    CHECK(w[0] == 0.0);
    CHECK(w[1] == doctest::Approx(1.0));
  }
  SUBCASE("all alignments zero") {
    CHECK_THROWS_AS(update_weights(kernels_with_alignment({0.0, 0.0}), swap_graph()), DegenerateError);
  }
}

TEST_CASE("update_weights maximizes alignment over the nonnegative sphere") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    for (Index m : {Index{2}, Index{3}}) {
      std::vector<double> delta;
      for (Index p = 0; p < m; ++p) delta.push_back(rng.uniform(0.05, 2.0));
      const auto w = update_weights(kernels_with_alignment(delta), swap_graph());
      double got = 0.0;
      for (Index p = 0; p < m; ++p) got += w[p] * delta[static_cast<size_t>(p)];
      double best = -1.0;
      if (m == 2) {
        for (int s = 0; s < 10000; ++s) {
          const double t = (M_PI / 2) * s / 9999.0;
          best = std::max(best, std::cos(t) * delta[0] + std::sin(t) * delta[1]);
        }
      } else {
        for (int s = 0; s < 100; ++s) {
          for (int u = 0; u < 100; ++u) {
            const double th = (M_PI / 2) * s / 99.0;
            const double ph = (M_PI / 2) * u / 99.0;
            best = std::max(best, std::sin(th) * std::cos(ph) * delta[0] +
                                      std::sin(th) * std::sin(ph) * delta[1] + std::cos(th) * delta[2]);
          }
        }
      }
      CHECK(got >= best - 1e-12);
      CHECK(got <= best + 1e-3);
    }
  }
}

TEST_CASE("update_graph") {
  SUBCASE("equal similarities split evenly") {
    Matrix k = Matrix::Constant(3, 3, 0.4);
    k.diagonal().setOnes();
    const KernelSet ks({KernelMatrix(k)});
    const auto z = update_graph(ks, KernelWeights::uniform(1), KernelMatrix(k), 1.0,
                                GammaVector(Vector::Ones(3)));
    for (Index i = 0; i < 3; ++i) {
      for (Index j = 0; j < 3; ++j) CHECK(z(i, j) == doctest::Approx(i == j ? 0.0 : 0.5));
    }
  }
  SUBCASE("rows match the bisection oracle and repeat exactly") {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
      const Index n = 10 + static_cast<Index>(rng.uniform_index(20));
      const KernelSet ks = testing::random_kernel_set(rng, n, 3);
      Vector w(3);
      w << rng.uniform(), rng.uniform(), rng.uniform();
      const KernelWeights weights(w / w.norm());
      const KernelMatrix kstar = average_kernel(ks);
      Vector g(n);
      for (Index i = 0; i < n; ++i) g(i) = rng.uniform(0.05, 1.0);
      const double alpha = rng.uniform(0.0, 4.0);
      const auto z = update_graph(ks, weights, kstar, alpha, GammaVector(g));
      for (Index i = 0; i < n; ++i) {
        const auto t = assemble_row_target(i, ks, weights, kstar, alpha);
        const Vector oracle = testing::bisection_simplex(-t.e / (2.0 * (alpha + g(i))), i);
        CHECK((z.values().row(i).transpose() - oracle).cwiseAbs().maxCoeff() <= 1e-8);
      }
      const auto again = update_graph(ks, weights, kstar, alpha, GammaVector(g));
      CHECK(again.values() == z.values());
      const auto threaded = update_graph(ks, weights, kstar, alpha, GammaVector(g), 4);
      CHECK(threaded.values() == z.values());
    }
  }
}

TEST_CASE("update_neighborhood_kernel") {
  SUBCASE("indefinite 2x2") {
    Matrix a(2, 2);
    a << 1, -2, -2, 1;
    const auto k = update_neighborhood_kernel(a);
    Matrix expected(2, 2);
    expected << 1.5, -1.5, -1.5, 1.5;
    CHECK((k.values() - expected).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("zero matrix") {
    CHECK(update_neighborhood_kernel(Matrix::Zero(4, 4)).values().isZero(0.0));
  }
  SUBCASE("PSD symmetric input is a fixed point") {
    // Row-stochastic, symmetric, PSD: (I + J/n) / 2 with the diagonal kept.
    const Index n = 5;
    const Matrix p = 0.5 * (Matrix::Identity(n, n) + Matrix::Ones(n, n) / static_cast<double>(n));
    CHECK((update_neighborhood_kernel(p).values() - p).cwiseAbs().maxCoeff() <= 1e-10);
  }
  SUBCASE("agrees with the Jacobi oracle and beats PSD probes") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
      const Index n = 4 + static_cast<Index>(rng.uniform_index(20));
      const Matrix z = testing::random_affinity(rng, n);
      const auto k = update_neighborhood_kernel(AffinityGraph(z));
      const Matrix a = 0.5 * (z + z.transpose());
      CHECK((k.values() - testing::jacobi_psd_clip(a)).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK(testing::min_eigenvalue_jacobi(k.values()) >= -1e-10);
      const double own = (k.values() - a).norm();
      for (int probe = 0; probe < 100; ++probe) {
        const Matrix p = testing::random_psd(rng, n, 1 + static_cast<Index>(rng.uniform_index(4))) * 0.2;
        CHECK(own <= (p - a).norm() + 1e-10);
      }
    }
  }
}

TEST_CASE("symmetric eigendecomposition residual") {
  Rng rng(41);
  for (Index n : {Index{1}, Index{2}, Index{10}, Index{60}, Index{200}}) {
    Matrix a(n, n);
    for (Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
    a = symmetrize(a);
    const auto eig = symmetric_eigen(a);
    const Matrix rec = eig.eigenvectors * eig.eigenvalues.asDiagonal() * eig.eigenvectors.transpose();
    CHECK((a - rec).norm() <= 1e-9 * a.norm());
    for (Index i = 1; i < n; ++i) CHECK(eig.eigenvalues(i - 1) <= eig.eigenvalues(i));
  }
}

TEST_CASE("objective examples") {
  Matrix k1(2, 2);
  k1 << 1, 0.5, 0.5, 1;
  const KernelSet ks({KernelMatrix(k1)});
  const KernelWeights w(Vector::Ones(1));
  Matrix z(2, 2);
  z << 0, 1, 1, 0;
  const GammaVector g(Vector::Ones(2));

  CHECK(objective(ks, w, z, KernelMatrix(z), 2.0, g) == doctest::Approx(1.0).epsilon(1e-15));
  // Z = K* zeroes the neighborhood term for any alpha.
  CHECK(objective(ks, w, z, KernelMatrix(z), 100.0, g) == doctest::Approx(1.0).epsilon(1e-15));
  const KernelMatrix kstar(k1);
  CHECK(objective(ks, w, Matrix::Zero(2, 2), kstar, 3.0, g) ==
        doctest::Approx(3.0 * k1.squaredNorm()).epsilon(1e-15));
}

TEST_CASE("solve recovers block structure") {
  const KernelSet ks({signed_blocks(6, 5)});
  SolverConfig cfg;
  cfg.neighbors = 3;
  cfg.alpha = 1.0;
  const auto state = solve(ks, cfg);
  const Matrix& z = state.graph.values();
  const double cross = z.topRightCorner(6, 5).cwiseAbs().sum() + z.bottomLeftCorner(5, 6).cwiseAbs().sum();
  CHECK(cross <= 1e-8);
  CHECK(state.converged);
  CHECK(testing::min_eigenvalue_jacobi(state.kstar.values()) >= -1e-8);
  const auto labels = kkm_cluster(state.kstar, 2, KkmOptions{});
  std::vector<int> truth(11, 0);
  std::fill(truth.begin() + 6, truth.end(), 1);
  CHECK(accuracy(labels.assignment, ClusterAssignment(truth, 2)) == 1.0);
}

TEST_CASE("solve objective is non-increasing") {
  Rng rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 20 + static_cast<Index>(rng.uniform_index(41));
    const Index m = 1 + static_cast<Index>(rng.uniform_index(4));
    const KernelSet ks = testing::random_kernel_set(rng, n, m);
    SolverConfig cfg;
    cfg.alpha = std::pow(2.0, static_cast<double>(rng.uniform_index(7)));
    const auto state = solve(ks, cfg);
    double prev = state.initial_objective;
    for (double f : state.objective_trace) {
      CHECK(f <= prev + 1e-8 * std::max(1.0, std::abs(prev)));
      prev = f;
    }
    CHECK(static_cast<int>(state.objective_trace.size()) == state.iterations);
    CHECK(std::abs(state.omega.values().squaredNorm() - 1.0) <= 1e-12);
  }
}

TEST_CASE("solve with identical kernels keeps equal weights") {
  Rng rng(8);
  const KernelSet base = testing::random_kernel_set(rng, 25, 1);
  const KernelSet ks({base[0], base[0]});
  SolverConfig cfg;
  cfg.max_iter = 5;
  cfg.rel_tol = 1e-300;
  const auto state = solve(ks, cfg);
  CHECK(state.omega[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(state.omega[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(state.iterations == 5);
  CHECK_FALSE(state.converged);
}

TEST_CASE("solve does not depend on thread count") {
  Rng rng(91);
  const KernelSet ks = testing::random_kernel_set(rng, 40, 3);
  SolverConfig cfg;
  cfg.alpha = 4.0;
  const auto one = solve(ks, cfg);
  cfg.threads = 3;
  const auto three = solve(ks, cfg);
  CHECK(one.graph.values() == three.graph.values());
  CHECK(one.kstar.values() == three.kstar.values());
  CHECK(one.objective_trace == three.objective_trace);
}

TEST_CASE("SolverConfig validation") {
  SolverConfig cfg;
  CHECK_NOTHROW(cfg.validate(10));
  cfg.neighbors = 9;
  CHECK_THROWS_AS(cfg.validate(10), ParameterError);
  cfg = SolverConfig{};
  cfg.alpha = -1.0;
  CHECK_THROWS_AS(cfg.validate(10), ParameterError);
  cfg = SolverConfig{};
  cfg.max_iter = 0;
  CHECK_THROWS_AS(cfg.validate(10), ParameterError);
  cfg = SolverConfig{};
  cfg.clusters = 11;
  CHECK_THROWS_AS(cfg.validate(10), ParameterError);
}

TEST_CASE("grid_search_alpha") {
  Rng rng(71);
  const KernelSet ks = testing::random_kernel_set(rng, 30, 2);
  SolverConfig cfg;
  cfg.clusters = 3;

  SUBCASE("default grid") {
    const auto grid = default_alpha_grid();
    REQUIRE(grid.size() == 11);
    for (size_t i = 0; i < grid.size(); ++i) CHECK(grid[i] == std::ldexp(1.0, static_cast<int>(i)));
  }
  SUBCASE("single alpha equals solve") {
    cfg.alpha = 8.0;
    const auto direct = solve(ks, cfg);
    const auto grid = grid_search_alpha(ks, cfg, {8.0});
    REQUIRE(grid.states.size() == 1);
    CHECK(grid.best_index == 0);
    CHECK(grid.states[0].kstar.values() == direct.kstar.values());
    CHECK(grid.states[0].objective_trace == direct.objective_trace);
  }
  SUBCASE("duplicates give identical states") {
    std::vector<int> truth(30);
    for (int i = 0; i < 30; ++i) truth[static_cast<size_t>(i)] = i % 3;
    const ClusterAssignment labels(truth, 3);
    KkmOptions kkm;
    kkm.kmeans.restarts = 5;
    const auto grid = grid_search_alpha(ks, cfg, {2.0, 2.0, 16.0}, &labels, kkm);
    CHECK(grid.states[0].kstar.values() == grid.states[1].kstar.values());
    CHECK(grid.report[0].acc == grid.report[1].acc);
    CHECK(grid.best_index != 1);
    CHECK(grid.best_clustering.has_value());
  }
  SUBCASE("empty grid") {
    CHECK_THROWS_AS(grid_search_alpha(ks, cfg, {}), ParameterError);
  }
}
