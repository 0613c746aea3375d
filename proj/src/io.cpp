#include "lswmkc/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lswmkc/errors.hpp"
#include "lswmkc/logging.hpp"

namespace lswmkc::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kRepairableAsymmetry = 1e-6;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(const std::string& token, const fs::path& path, size_t line) {
  const std::string t = trim(token);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size() || t.empty()) {
    std::ostringstream msg;
    msg << path.string() << ":" << line << ": cannot parse number '" << t << "'";
    throw IoError(msg.str());
  }
  return v;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(v);
  return v;
}

}  // namespace

Matrix read_matrix_csv(const fs::path& path) {
  auto in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string token;
    while (std::getline(ss, token, ',')) row.push_back(parse_double(token, path, lineno));
    if (!rows.empty() && row.size() != rows.front().size()) {
      std::ostringstream msg;
      msg << path.string() << ":" << lineno << ": row has " << row.size() << " columns, expected "
          << rows.front().size();
      throw IoError(msg.str());
    }
    rows.push_back(std::move(row));
  }
  const auto r = static_cast<Index>(rows.size());
  const Index c = rows.empty() ? 0 : static_cast<Index>(rows.front().size());
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < c; ++j) m(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
  }
  return m;
}

void write_matrix_csv(const fs::path& path, const Matrix& m) {
  auto out = open_out(path);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

Matrix read_matrix_binary(const fs::path& path) {
  auto in = open_in(path, std::ios::binary);
  char magic[4];
  std::uint64_t n_le = 0;
  if (!in.read(magic, 4) || std::memcmp(magic, kBinaryMagic, 4) != 0) {
    throw IoError(path.string() + ": missing KMX1 header");
  }
  if (!in.read(reinterpret_cast<char*>(&n_le), sizeof(n_le))) {
    throw IoError(path.string() + ": truncated header");
  }
  const std::uint64_t n = to_le(n_le);
  if (n > (1ULL << 20)) throw IoError(path.string() + ": implausible size " + std::to_string(n));
  Matrix m(static_cast<Index>(n), static_cast<Index>(n));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::uint64_t bits = 0;
      if (!in.read(reinterpret_cast<char*>(&bits), sizeof(bits))) {
        throw IoError(path.string() + ": truncated payload");
      }
      m(i, j) = std::bit_cast<double>(to_le(bits));
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw IoError(path.string() + ": trailing bytes after payload");
  }
  return m;
}

void write_matrix_binary(const fs::path& path, const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("binary kernel format needs a square matrix");
  auto out = open_out(path, std::ios::binary);
  out.write(kBinaryMagic, 4);
  const std::uint64_t n = to_le(static_cast<std::uint64_t>(m.rows()));
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      const std::uint64_t bits = to_le(std::bit_cast<std::uint64_t>(m(i, j)));
      out.write(reinterpret_cast<const char*>(&bits), sizeof(bits));
    }
  }
}

Matrix read_matrix(const fs::path& path) {
  auto in = open_in(path, std::ios::binary);
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() == 4 && std::memcmp(magic, kBinaryMagic, 4) == 0) return read_matrix_binary(path);
  return read_matrix_csv(path);
}

KernelMatrix read_kernel(const fs::path& path) {
  Matrix m = read_matrix(path);
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream msg;
    msg << path.string() << ": kernel must be a non-empty square matrix, got " << m.rows() << "x"
        << m.cols();
    throw DimensionError(msg.str());
  }
  if (!m.allFinite()) throw InputError(path.string() + ": kernel has non-finite entries");
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kRepairableAsymmetry) {
    std::ostringstream msg;
    msg << path.string() << ": kernel asymmetry " << asym << " exceeds 1e-6";
    throw InputError(msg.str());
  }
  if (asym > 1e-9) {
    log::warn(path.string() + ": symmetrizing kernel with asymmetry " + std::to_string(asym));
  }
  if (asym > 0.0) m = symmetrize(m);
  return KernelMatrix(std::move(m));
}

std::vector<int> read_labels(const fs::path& path) {
  auto in = open_in(path);
  std::vector<int> labels;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    int v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
      std::ostringstream msg;
      msg << path.string() << ":" << lineno << ": cannot parse label '" << t << "'";
      throw IoError(msg.str());
    }
    if (v < 0) {
      std::ostringstream msg;
      msg << path.string() << ":" << lineno << ": negative label " << v;
      throw IoError(msg.str());
    }
    labels.push_back(v);
  }
  return labels;
}

void write_labels(const fs::path& path, const std::vector<int>& labels) {
  auto out = open_out(path);
  for (int l : labels) out << l << '\n';
}

DatasetManifest read_manifest_file(const fs::path& path) {
  auto in = open_in(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  DatasetManifest m;
  try {
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != kFormatVersion) {
      throw IoError(path.string() + ": unsupported format_version " +
                    std::to_string(m.format_version));
    }
    m.name = j.value("name", std::string{});
    m.n = j.at("n").get<Index>();
    m.m = j.at("m").get<Index>();
    m.k = j.at("k").get<int>();
    m.kernel_paths = j.at("kernel_paths").get<std::vector<std::string>>();
    if (j.contains("labels_path") && !j.at("labels_path").is_null()) {
      m.labels_path = j.at("labels_path").get<std::string>();
    }
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  if (static_cast<Index>(m.kernel_paths.size()) != m.m) {
    std::ostringstream msg;
    msg << path.string() << ": m = " << m.m << " but " << m.kernel_paths.size()
        << " kernel paths listed";
    throw InputError(msg.str());
  }
  return m;
}

void write_manifest_file(const fs::path& path, const DatasetManifest& m) {
  json j;
  j["format_version"] = m.format_version;
  j["name"] = m.name;
  j["n"] = m.n;
  j["m"] = m.m;
  j["k"] = m.k;
  j["kernel_paths"] = m.kernel_paths;
  if (m.labels_path) j["labels_path"] = *m.labels_path;
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

Dataset load_manifest(const fs::path& path) {
  Dataset ds;
  ds.manifest = read_manifest_file(path);
  const fs::path base = path.parent_path();
  std::vector<KernelMatrix> kernels;
  for (const auto& rel : ds.manifest.kernel_paths) {
    const fs::path file = base / rel;
    if (!fs::exists(file)) throw IoError("missing kernel file " + file.string());
    KernelMatrix k = read_kernel(file);
    if (k.size() != ds.manifest.n) {
      std::ostringstream msg;
      msg << file.string() << ": shape " << k.size() << "x" << k.size() << " but manifest n = "
          << ds.manifest.n;
      throw DimensionError(msg.str());
    }
    kernels.push_back(std::move(k));
  }
  ds.kernels = KernelSet(std::move(kernels));
  if (ds.manifest.labels_path) {
    const fs::path file = base / *ds.manifest.labels_path;
    if (!fs::exists(file)) throw IoError("missing labels file " + file.string());
    auto labels = read_labels(file);
    if (static_cast<Index>(labels.size()) != ds.manifest.n) {
      std::ostringstream msg;
      msg << file.string() << ": " << labels.size() << " labels but n = " << ds.manifest.n;
      throw DimensionError(msg.str());
    }
    try {
      ds.truth = ClusterAssignment(std::move(labels), ds.manifest.k);
    } catch (const InputError& e) {
      throw InputError(file.string() + ": label out of range: " + e.what());
    }
  }
  return ds;
}

fs::path write_dataset(const fs::path& dir, const std::string& name, const KernelSet& kernels,
                       int k, const ClusterAssignment* truth) {
  fs::create_directories(dir);
  DatasetManifest m;
  m.name = name;
  m.n = kernels.num_samples();
  m.m = kernels.num_kernels();
  m.k = k;
  for (Index p = 0; p < kernels.num_kernels(); ++p) {
    const std::string file = "kernel_" + std::to_string(p) + ".csv";
    write_matrix_csv(dir / file, kernels[p].values());
    m.kernel_paths.push_back(file);
  }
  if (truth != nullptr) {
    write_labels(dir / "labels.csv", truth->labels());
    m.labels_path = "labels.csv";
  }
  const fs::path manifest = dir / "manifest.json";
  write_manifest_file(manifest, m);
  return manifest;
}

namespace {

json to_json(const RunResult& r) {
  json j;
  j["format_version"] = r.format_version;
  j["algorithm"] = r.algorithm;
  json params;
  params["alpha"] = r.parameters.alpha ? json(*r.parameters.alpha) : json(nullptr);
  params["neighbors"] = r.parameters.neighbors ? json(*r.parameters.neighbors) : json(nullptr);
  params["tau"] = r.parameters.tau ? json(*r.parameters.tau) : json(nullptr);
  params["k"] = r.parameters.k;
  params["restarts"] = r.parameters.restarts;
  params["seed"] = r.parameters.seed;
  params["max_iter"] = r.parameters.max_iter;
  params["rel_tol"] = r.parameters.rel_tol;
  j["parameters"] = params;
  j["labels"] = r.labels;
  if (r.metrics) {
    j["metrics"] = {{"acc", r.metrics->acc},
                    {"nmi", r.metrics->nmi},
                    {"purity", r.metrics->purity},
                    {"ari", r.metrics->ari}};
  } else {
    j["metrics"] = nullptr;
  }
  j["objective_trace"] = r.objective_trace;
  j["weights"] = r.weights;
  json sweep = json::array();
  for (const auto& s : r.sweep) {
    sweep.push_back({{"value", s.value},
                     {"acc", s.acc ? json(*s.acc) : json(nullptr)},
                     {"score", s.score ? json(*s.score) : json(nullptr)},
                     {"iterations", s.iterations},
                     {"converged", s.converged}});
  }
  j["sweep"] = sweep;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["runtime_ms"] = r.runtime_ms;
  return j;
}

template <typename T>
std::optional<T> opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

std::string to_json_string(const RunResult& result) { return to_json(result).dump(2); }

RunResult run_result_from_json_string(const std::string& text) {
  RunResult r;
  try {
    const json j = json::parse(text);
    r.format_version = j.at("format_version").get<int>();
    if (r.format_version != kFormatVersion) {
      throw IoError("unsupported run result format_version " + std::to_string(r.format_version));
    }
    r.algorithm = j.at("algorithm").get<std::string>();
    const json& p = j.at("parameters");
    r.parameters.alpha = opt<double>(p, "alpha");
    r.parameters.neighbors = opt<Index>(p, "neighbors");
    r.parameters.tau = opt<double>(p, "tau");
    r.parameters.k = p.at("k").get<int>();
    r.parameters.restarts = p.at("restarts").get<int>();
    r.parameters.seed = p.at("seed").get<std::uint64_t>();
    r.parameters.max_iter = p.at("max_iter").get<int>();
    r.parameters.rel_tol = p.at("rel_tol").get<double>();
    r.labels = j.at("labels").get<std::vector<int>>();
    if (!j.at("metrics").is_null()) {
      const json& m = j.at("metrics");
      r.metrics = RunMetrics{m.at("acc").get<double>(), m.at("nmi").get<double>(),
                             m.at("purity").get<double>(), m.at("ari").get<double>()};
    }
    r.objective_trace = j.at("objective_trace").get<std::vector<double>>();
    r.weights = j.at("weights").get<std::vector<double>>();
    for (const auto& s : j.at("sweep")) {
      r.sweep.push_back({s.at("value").get<double>(), opt<double>(s, "acc"), opt<double>(s, "score"),
                         s.at("iterations").get<int>(), s.at("converged").get<bool>()});
    }
    r.converged = j.at("converged").get<bool>();
    r.iterations = j.at("iterations").get<int>();
    r.runtime_ms = j.at("runtime_ms").get<double>();
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed run result: ") + e.what());
  }
  return r;
}

void write_run_result(const fs::path& path, const RunResult& result) {
  auto out = open_out(path);
  out << to_json_string(result) << '\n';
}

RunResult read_run_result(const fs::path& path) {
  auto in = open_in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return run_result_from_json_string(ss.str());
}

}  // namespace lswmkc::io
