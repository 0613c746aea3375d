#include <doctest.h>

#include "lswmkc/errors.hpp"
#include "lswmkc/knn_baseline.hpp"
#include "lswmkc/metrics.hpp"
#include "test_support.hpp"

using namespace lswmkc;

TEST_CASE("neighbor_count") {
  CHECK(neighbor_count(0.5, 4) == 2);
  CHECK(neighbor_count(1.0, 7) == 7);
  CHECK(neighbor_count(0.25, 10) == 3);
  CHECK_THROWS_AS(neighbor_count(0.0, 10), ParameterError);
  CHECK_THROWS_AS(neighbor_count(1.1, 10), ParameterError);
  CHECK_THROWS_AS(neighbor_count(0.01, 10), ParameterError);
}

TEST_CASE("build_neighbor_mask") {
  Matrix k(4, 4);
  k << 1, 0.9, 0.2, 0.1,
       0.9, 1, 0.3, 0.4,
       0.2, 0.3, 1, 0.5,
       0.1, 0.4, 0.5, 1;
  const KernelMatrix kern(k);

  SUBCASE("full mask") {
    const auto m = build_neighbor_mask(kern, 1.0);
    CHECK(m.is_full());
    CHECK((m.mask.array() == 1).all());
  }
  SUBCASE("half mask, worked row") {
    const auto m = build_neighbor_mask(kern, 0.5);
    CHECK(m.per_row == 2);
    CHECK(m.mask(0, 0) == 1);
    CHECK(m.mask(0, 1) == 1);
    CHECK(m.mask(0, 2) == 0);
    CHECK(m.mask(0, 3) == 0);
    for (Index i = 0; i < 4; ++i) CHECK(m.mask(i, i) == 1);
  }
  SUBCASE("ties break by index") {
    const auto m = build_neighbor_mask(KernelMatrix(Matrix::Ones(5, 5)), 0.4);
    for (Index i = 0; i < 5; ++i) {
      CHECK(m.mask(i, 0) == 1);
      CHECK(m.mask(i, 1) == 1);
      CHECK(m.mask.row(i).cast<int>().sum() == 2);
    }
  }
}

TEST_CASE("localize_kernel") {
  Matrix k(2, 2);
  k << 1, 0.5, 0.5, 1;
  NeighborMask m;
  m.mask = MaskMatrix(2, 2);
  m.mask << 1, 0, 1, 1;
  m.per_row = 1;
  m.tau = 0.5;
  Matrix expected(2, 2);
  expected << 1, 0, 0.5, 1;
  CHECK(localize_kernel(KernelMatrix(k), m) == expected);

  m.mask.setOnes();
  CHECK(localize_kernel(KernelMatrix(k), m) == k);
  m.mask.row(1).setZero();
  CHECK(localize_kernel(KernelMatrix(k), m).row(1).isZero(0.0));

  m.mask = MaskMatrix::Ones(3, 3);
  CHECK_THROWS_AS(localize_kernel(KernelMatrix(k), m), DimensionError);
}

TEST_CASE("mask properties on random kernels") {
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 10 + static_cast<Index>(rng.uniform_index(30));
    const KernelSet ks = testing::random_kernel_set(rng, n, 3);
    const KernelMatrix ref = average_kernel(ks);
    NeighborMask prev;
    bool have_prev = false;
    for (double tau : default_tau_grid()) {
      const auto m = build_neighbor_mask(ref, tau);
      const Index per_row = neighbor_count(tau, n);
      for (Index i = 0; i < n; ++i) {
        CHECK(m.mask.row(i).cast<Index>().sum() == per_row);
        CHECK(m.mask(i, i) == 1);
        const Matrix local = localize_kernel(ks[0], m);
        // Preprocessed kernels can have exact zeros only with probability 0.
        CHECK(static_cast<Index>((local.row(i).array() != 0.0).count()) == per_row);
      }
      if (have_prev) {
        CHECK((prev.mask.array() <= m.mask.array()).all());
      }
      prev = m;
      have_prev = true;
    }
  }
}

TEST_CASE("full mask reproduces the average path exactly") {
  Rng rng(29);
  const KernelSet ks = testing::random_kernel_set(rng, 24, 3);
  const auto m = build_neighbor_mask(average_kernel(ks), 1.0);
  CHECK(localized_average(ks, m).values() == average_kernel(ks).values());
  KkmOptions opts;
  opts.kmeans.restarts = 8;
  const auto knn = knn_baseline_cluster(ks, 3, {1.0}, opts);
  const auto avg = avg_kkm(ks, 3, opts);
  CHECK(knn.clustering.assignment == avg.assignment);
  CHECK(knn.clustering.restart_wcss == avg.restart_wcss);
}

TEST_CASE("localized average is symmetric PSD") {
  Rng rng(37);
  const KernelSet ks = testing::random_kernel_set(rng, 30, 2);
  const auto m = build_neighbor_mask(average_kernel(ks), 0.3);
  const auto k = localized_average(ks, m);
  CHECK(testing::min_eigenvalue_jacobi(k.values()) >= -1e-10);
}

TEST_CASE("block kernels are recovered") {
  const std::vector<Index> sizes = {10, 10, 10};
  const Matrix k = testing::block_ones(sizes);
  const KernelSet ks({KernelMatrix(k), KernelMatrix(k)});
  std::vector<int> truth;
  for (int b = 0; b < 3; ++b) truth.insert(truth.end(), 10, b);
  const ClusterAssignment labels(truth, 3);
  KkmOptions opts;
  opts.kmeans.restarts = 10;
  opts.kmeans.truth = &labels;
  const auto res = knn_baseline_cluster(ks, 3, {0.4, 0.5, 0.9}, opts);
  for (const auto& r : res.report) CHECK(r.acc.value() == 1.0);
  CHECK(accuracy(res.clustering.assignment, labels) == 1.0);
}

TEST_CASE("default tau grid") {
  const auto g = default_tau_grid();
  REQUIRE(g.size() == 9);
  for (size_t i = 0; i < 9; ++i) CHECK(g[i] == doctest::Approx(0.1 * static_cast<double>(i + 1)));
}
