#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "lswmkc/errors.hpp"
#include "lswmkc/io.hpp"
#include "test_support.hpp"

using namespace lswmkc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("lswmkc_io_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_text(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST_CASE("CSV and binary kernels parse identically") {
  TempDir dir("formats");
  Rng rng(1);
  const KernelSet ks = testing::random_kernel_set(rng, 9, 1);
  io::write_matrix_csv(dir.path / "k.csv", ks[0].values());
  io::write_matrix_binary(dir.path / "k.kmx", ks[0].values());
  const Matrix a = io::read_matrix(dir.path / "k.csv");
  const Matrix b = io::read_matrix(dir.path / "k.kmx");
  CHECK(a == ks[0].values());
  CHECK(a == b);
  CHECK(io::read_kernel(dir.path / "k.kmx").values() == a);
}

TEST_CASE("binary format rejects corrupt files") {
  TempDir dir("corrupt");
  io::write_matrix_binary(dir.path / "k.kmx", Matrix::Identity(3, 3));
  {
    std::ofstream out(dir.path / "k.kmx", std::ios::binary | std::ios::app);
    out.put('\0');
  }
  CHECK_THROWS_AS(io::read_matrix_binary(dir.path / "k.kmx"), IoError);
  write_text(dir.path / "short.kmx", "KMX1\x03");
  CHECK_THROWS_AS(io::read_matrix_binary(dir.path / "short.kmx"), IoError);
}

TEST_CASE("CSV parsing") {
  TempDir dir("csv");
  write_text(dir.path / "ok.csv", "1, 0.5\n0.5,1\n\n");
  Matrix expected(2, 2);
  expected << 1, 0.5, 0.5, 1;
  CHECK(io::read_matrix_csv(dir.path / "ok.csv") == expected);
  write_text(dir.path / "ragged.csv", "1,2\n3\n");
  CHECK_THROWS_AS(io::read_matrix_csv(dir.path / "ragged.csv"), IoError);
  write_text(dir.path / "junk.csv", "1,x\n3,4\n");
  CHECK_THROWS_AS(io::read_matrix_csv(dir.path / "junk.csv"), IoError);
}

TEST_CASE("kernel symmetry handling") {
  TempDir dir("sym");
  Matrix k(2, 2);
  k << 1, 0.5, 0.5 + 1e-8, 1;
  io::write_matrix_csv(dir.path / "near.csv", k);
  const auto repaired = io::read_kernel(dir.path / "near.csv");
  CHECK(repaired(0, 1) == repaired(1, 0));
  CHECK(repaired(0, 1) == doctest::Approx(0.5 + 5e-9).epsilon(1e-15));
  k(1, 0) = 0.5 + 1e-5;
  io::write_matrix_csv(dir.path / "far.csv", k);
  CHECK_THROWS_AS(io::read_kernel(dir.path / "far.csv"), InputError);
}

TEST_CASE("manifest round trip and errors") {
  TempDir dir("manifest");
  Rng rng(2);
  const KernelSet ks = testing::random_kernel_set(rng, 8, 2);
  const ClusterAssignment truth({0, 0, 0, 1, 1, 1, 2, 2}, 3);
  const fs::path manifest = io::write_dataset(dir.path, "toy", ks, 3, &truth);

  SUBCASE("valid") {
    const auto ds = io::load_manifest(manifest);
    CHECK(ds.kernels.num_kernels() == 2);
    CHECK(ds.manifest.name == "toy");
    CHECK(ds.manifest.k == 3);
    CHECK(ds.truth.value() == truth);
    for (Index p = 0; p < 2; ++p) CHECK(ds.kernels[p].values() == ks[p].values());
  }
  SUBCASE("non-square kernel file") {
    io::write_matrix_csv(dir.path / "kernel_1.csv", Matrix::Zero(8, 7));
    try {
      io::load_manifest(manifest);
      FAIL("expected DimensionError");
    } catch (const DimensionError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("kernel_1.csv") != std::string::npos);
      CHECK(msg.find("8x7") != std::string::npos);
    }
  }
  SUBCASE("label out of range") {
    write_text(dir.path / "labels.csv", "0\n0\n0\n1\n1\n1\n2\n3\n");
    CHECK_THROWS_AS(io::load_manifest(manifest), InputError);
  }
  SUBCASE("label count mismatch") {
    write_text(dir.path / "labels.csv", "0\n1\n");
    CHECK_THROWS_AS(io::load_manifest(manifest), DimensionError);
  }
  SUBCASE("missing kernel file") {
    fs::remove(dir.path / "kernel_0.csv");
    CHECK_THROWS_AS(io::load_manifest(manifest), IoError);
  }
  SUBCASE("kernel of the wrong size") {
    io::write_matrix_csv(dir.path / "kernel_0.csv", Matrix::Identity(5, 5));
    CHECK_THROWS_AS(io::load_manifest(manifest), DimensionError);
  }
  SUBCASE("unsupported version") {
    auto m = io::read_manifest_file(manifest);
    m.format_version = 2;
    io::write_manifest_file(manifest, m);
    CHECK_THROWS_AS(io::load_manifest(manifest), IoError);
  }
}

TEST_CASE("RunResult round trip keeps full precision") {
  io::RunResult r;
  r.algorithm = "lswmkc";
  r.parameters.alpha = 0.1 + 0.2;
  r.parameters.neighbors = 5;
  r.parameters.k = 3;
  r.parameters.restarts = 50;
  r.parameters.seed = 18446744073709551615ULL;
  r.parameters.max_iter = 50;
  r.parameters.rel_tol = 1e-6;
  r.labels = {0, 2, 1, 1};
  r.metrics = io::RunMetrics{1.0 / 3, 2.0 / 7, 0.75, -1.0 / 9};
  r.objective_trace = {-12.345678901234567, -12.3456789012345, 1e-300};
  r.weights = {std::sqrt(0.5), std::sqrt(0.5)};
  r.sweep.push_back(io::SweepEntry{4.0, 0.9, -3.25, 7, true});
  r.converged = true;
  r.iterations = 3;
  r.runtime_ms = 12.5;

  const auto back = io::run_result_from_json_string(io::to_json_string(r));
  CHECK(back.algorithm == r.algorithm);
  CHECK(back.parameters.alpha == r.parameters.alpha);
  CHECK(back.parameters.neighbors == r.parameters.neighbors);
  CHECK_FALSE(back.parameters.tau.has_value());
  CHECK(back.parameters.seed == r.parameters.seed);
  CHECK(back.parameters.rel_tol == r.parameters.rel_tol);
  CHECK(back.labels == r.labels);
  REQUIRE(back.metrics.has_value());
  CHECK(back.metrics->nmi == r.metrics->nmi);
  CHECK(back.metrics->ari == r.metrics->ari);
  CHECK(back.objective_trace == r.objective_trace);
  CHECK(back.weights == r.weights);
  REQUIRE(back.sweep.size() == 1);
  CHECK(back.sweep[0].score == r.sweep[0].score);
  CHECK(back.converged);
  CHECK(back.iterations == 3);
  CHECK(back.runtime_ms == 12.5);

  CHECK_THROWS_AS(io::run_result_from_json_string("{\"format_version\": 1}"), IoError);
}

TEST_CASE("labels files") {
  TempDir dir("labels");
  io::write_labels(dir.path / "l.csv", {3, 0, 1});
  CHECK(io::read_labels(dir.path / "l.csv") == std::vector<int>{3, 0, 1});
  write_text(dir.path / "bad.csv", "1\n-1\n");
  CHECK_THROWS_AS(io::read_labels(dir.path / "bad.csv"), IoError);
}
