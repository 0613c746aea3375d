#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lswmkc/assignment.hpp"
#include "lswmkc/kernel_ops.hpp"
#include "lswmkc/types.hpp"

namespace lswmkc::io {

inline constexpr int kFormatVersion = 1;
inline constexpr char kBinaryMagic[4] = {'K', 'M', 'X', '1'};

// Dense row-major CSV without header.
Matrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

// "KMX1", u64 n (LE), n*n f64 (LE) row-major.
Matrix read_matrix_binary(const std::filesystem::path& path);
void write_matrix_binary(const std::filesystem::path& path, const Matrix& m);

// Dispatches on the leading magic bytes.
Matrix read_matrix(const std::filesystem::path& path);

// Reads a kernel file, requiring an n x n matrix. Asymmetry up to 1e-6 is
// repaired by averaging with the transpose (logged); beyond that it is an
// InputError.
KernelMatrix read_kernel(const std::filesystem::path& path);

// One integer label per line.
std::vector<int> read_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, const std::vector<int>& labels);

struct DatasetManifest {
  int format_version = kFormatVersion;
  std::string name;
  Index n = 0;
  Index m = 0;
  int k = 0;
  std::vector<std::string> kernel_paths;  // relative to the manifest directory
  std::optional<std::string> labels_path;
};

struct Dataset {
  DatasetManifest manifest;
  KernelSet kernels;
  std::optional<ClusterAssignment> truth;
};

DatasetManifest read_manifest_file(const std::filesystem::path& path);
void write_manifest_file(const std::filesystem::path& path, const DatasetManifest& manifest);

// Parses the manifest and every file it references, checking shapes, counts
// and label range.
Dataset load_manifest(const std::filesystem::path& path);

// Writes kernels (CSV), labels and manifest.json into `dir`.
std::filesystem::path write_dataset(const std::filesystem::path& dir, const std::string& name,
                                    const KernelSet& kernels, int k,
                                    const ClusterAssignment* truth);

struct RunParameters {
  std::optional<double> alpha;
  std::optional<Index> neighbors;
  std::optional<double> tau;
  int k = 0;
  int restarts = 0;
  std::uint64_t seed = 0;
  int max_iter = 0;
  double rel_tol = 0.0;
};

struct RunMetrics {
  double acc = 0.0;
  double nmi = 0.0;
  double purity = 0.0;
  double ari = 0.0;
};

struct SweepEntry {
  double value = 0.0;  // alpha or tau
  std::optional<double> acc;
  std::optional<double> score;  // final objective (alpha) or spectral mass (tau)
  int iterations = 0;
  bool converged = true;
};

struct RunResult {
  int format_version = kFormatVersion;
  std::string algorithm;
  RunParameters parameters;
  std::vector<int> labels;
  std::optional<RunMetrics> metrics;
  std::vector<double> objective_trace;
  std::vector<double> weights;
  std::vector<SweepEntry> sweep;
  bool converged = false;
  int iterations = 0;
  double runtime_ms = 0.0;
};

std::string to_json_string(const RunResult& result);
RunResult run_result_from_json_string(const std::string& text);

void write_run_result(const std::filesystem::path& path, const RunResult& result);
RunResult read_run_result(const std::filesystem::path& path);

}  // namespace lswmkc::io
