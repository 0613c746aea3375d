#include "lswmkc/cli.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lswmkc/errors.hpp"
#include "lswmkc/io.hpp"
#include "lswmkc/kernel_kmeans.hpp"
#include "lswmkc/knn_baseline.hpp"
#include "lswmkc/linalg.hpp"
#include "lswmkc/logging.hpp"
#include "lswmkc/metrics.hpp"
#include "lswmkc/solver.hpp"
#include "lswmkc/synth_data.hpp"

namespace lswmkc {

namespace fs = std::filesystem;

namespace {

struct ClusterArgs {
  std::string algo = "lswmkc";
  std::string data;
  int clusters = 0;
  std::optional<double> alpha;
  bool grid_alpha = false;
  Index neighbors = 5;
  std::optional<double> tau;
  std::string tau_grid;
  int restarts = 50;
  int max_iter = 50;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out;
  std::string dump_dir;
  bool normalize_rows = false;
};

struct SynthArgs {
  SyntheticSpec spec;
  std::string out;
  std::string name = "synthetic";
};

struct PreprocessArgs {
  std::string data;
  std::string out;
  bool binary = false;
};

struct EvalArgs {
  std::string pred;
  std::string truth;
  std::string out;
};

struct InspectArgs {
  std::string data;
  std::vector<std::string> kernels;
};

// "A:B:STEP" -> A, A+STEP, ... <= B.
std::vector<double> parse_range(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ':')) {
    try {
      parts.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw ParameterError("cannot parse range '" + text + "'");
    }
  }
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
    throw ParameterError("range must be A:B:STEP with STEP > 0 and B >= A, got '" + text + "'");
  }
  std::vector<double> values;
  for (int i = 0;; ++i) {
    const double v = std::round((parts[0] + i * parts[2]) * 1e12) / 1e12;
    if (v > parts[1] + 1e-12) break;
    values.push_back(v);
  }
  return values;
}

io::RunMetrics to_run_metrics(const MetricReport& m) { return {m.acc, m.nmi, m.purity, m.ari}; }

void dump(const std::string& dir, const std::string& name, const Matrix& m) {
  if (dir.empty()) return;
  fs::create_directories(dir);
  io::write_matrix_csv(fs::path(dir) / name, m);
}

int run_cluster(const ClusterArgs& args, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const io::Dataset ds = io::load_manifest(args.data);
  const int k = args.clusters > 0 ? args.clusters : ds.manifest.k;
  const ClusterAssignment* truth = ds.truth ? &*ds.truth : nullptr;

  KkmOptions kkm;
  kkm.normalize_rows = args.normalize_rows;
  kkm.kmeans.restarts = args.restarts;
  kkm.kmeans.seed = args.seed;
  kkm.kmeans.threads = args.threads;
  kkm.kmeans.truth = truth;

  io::RunResult result;
  result.algorithm = args.algo;
  result.parameters.k = k;
  result.parameters.restarts = args.restarts;
  result.parameters.seed = args.seed;
  result.parameters.max_iter = args.max_iter;
  result.parameters.rel_tol = args.tol;

  ClusterAssignment labels;
  if (args.algo == "lswmkc") {
    SolverConfig cfg;
    cfg.alpha = args.alpha.value_or(1.0);
    cfg.neighbors = args.neighbors;
    cfg.clusters = k;
    cfg.max_iter = args.max_iter;
    cfg.rel_tol = args.tol;
    cfg.seed = args.seed;
    cfg.threads = args.threads;
    result.parameters.neighbors = args.neighbors;

    const std::vector<double> alphas =
        args.grid_alpha ? default_alpha_grid() : std::vector<double>{cfg.alpha};
    GridSearchResult grid = grid_search_alpha(ds.kernels, cfg, alphas, truth, kkm);
    const SolverState& best = grid.states[grid.best_index];
    result.parameters.alpha = grid.report[grid.best_index].alpha;
    result.objective_trace = best.objective_trace;
    result.weights.assign(best.omega.values().begin(), best.omega.values().end());
    result.converged = best.converged;
    result.iterations = best.iterations;
    if (args.grid_alpha) {
      for (const auto& r : grid.report) {
        result.sweep.push_back({r.alpha, r.acc, r.final_objective, r.iterations, r.converged});
      }
    }
    labels = grid.best_clustering ? grid.best_clustering->assignment
                                  : kkm_cluster(best.kstar, k, kkm).assignment;
    dump(args.dump_dir, "Z.csv", best.graph.values());
    dump(args.dump_dir, "kstar.csv", best.kstar.values());
  } else if (args.algo == "avgkkm") {
    labels = avg_kkm(ds.kernels, k, kkm).assignment;
    result.weights.assign(static_cast<size_t>(ds.kernels.num_kernels()),
                          1.0 / static_cast<double>(ds.kernels.num_kernels()));
    result.converged = true;
    dump(args.dump_dir, "average_kernel.csv", average_kernel(ds.kernels).values());
  } else if (args.algo == "mkkm") {
    MkkmResult r = mkkm(ds.kernels, k, kkm, args.max_iter, args.tol);
    labels = r.clustering.assignment;
    result.weights.assign(r.weights.begin(), r.weights.end());
    result.objective_trace = r.objective;
    result.converged = r.converged;
    result.iterations = r.iterations;
    dump(args.dump_dir, "combined_kernel.csv",
         combine_weighted(ds.kernels, r.weights, /*squared=*/true).values());
  } else if (args.algo == "knn") {
    std::vector<double> grid;
    if (args.tau) {
      grid = {*args.tau};
    } else {
      grid = args.tau_grid.empty() ? default_tau_grid() : parse_range(args.tau_grid);
    }
    KnnResult r = knn_baseline_cluster(ds.kernels, k, grid, kkm);
    labels = r.clustering.assignment;
    result.parameters.tau = r.best_tau;
    result.converged = true;
    if (grid.size() > 1) {
      for (const auto& t : r.report) result.sweep.push_back({t.tau, t.acc, t.spectral_mass, 0, true});
    }
    if (!args.dump_dir.empty()) {
      const NeighborMask mask = build_neighbor_mask(average_kernel(ds.kernels), r.best_tau);
      dump(args.dump_dir, "mask.csv", mask.mask.cast<double>());
      dump(args.dump_dir, "localized_kernel.csv", localized_average(ds.kernels, mask).values());
    }
  } else {
    throw ParameterError("unknown algorithm '" + args.algo + "'");
  }

  result.labels = labels.labels();
  if (truth != nullptr) result.metrics = to_run_metrics(evaluate(labels, *truth));
  result.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  if (!args.out.empty()) io::write_run_result(args.out, result);

  out << "algorithm " << result.algorithm << "  k=" << k;
  if (result.parameters.alpha) out << "  alpha=" << *result.parameters.alpha;
  if (result.parameters.tau) out << "  tau=" << *result.parameters.tau;
  out << "  iterations=" << result.iterations << (result.converged ? " (converged)" : "") << '\n';
  if (!result.sweep.empty()) {
    out << (args.algo == "knn" ? "tau" : "alpha") << "\tacc\tscore\n";
    for (const auto& s : result.sweep) {
      out << s.value << '\t' << (s.acc ? std::to_string(*s.acc) : "-") << '\t'
          << (s.score ? std::to_string(*s.score) : "-") << '\n';
    }
  }
  if (result.metrics) {
    out << std::fixed << std::setprecision(4) << "ACC " << result.metrics->acc << "  NMI "
        << result.metrics->nmi << "  Purity " << result.metrics->purity << "  ARI "
        << result.metrics->ari << '\n';
  }
  return 0;
}

int run_synth(const SynthArgs& args, std::ostream& out) {
  const SyntheticDataset ds = generate(args.spec);
  const fs::path manifest =
      io::write_dataset(args.out, args.name, ds.kernels, args.spec.clusters, &ds.truth);
  out << "wrote " << manifest.string() << " (n=" << ds.kernels.num_samples()
      << ", m=" << ds.kernels.num_kernels() << ", k=" << args.spec.clusters << ")\n";
  return 0;
}

int run_preprocess(const PreprocessArgs& args, std::ostream& out) {
  const io::Dataset ds = io::load_manifest(args.data);
  fs::create_directories(args.out);
  io::DatasetManifest m = ds.manifest;
  m.kernel_paths.clear();
  for (Index p = 0; p < ds.kernels.num_kernels(); ++p) {
    const KernelMatrix k = preprocess_kernel(ds.kernels[p]);
    const std::string file = "kernel_" + std::to_string(p) + (args.binary ? ".kmx" : ".csv");
    if (args.binary) {
      io::write_matrix_binary(fs::path(args.out) / file, k.values());
    } else {
      io::write_matrix_csv(fs::path(args.out) / file, k.values());
    }
    m.kernel_paths.push_back(file);
  }
  if (ds.truth) {
    io::write_labels(fs::path(args.out) / "labels.csv", ds.truth->labels());
    m.labels_path = "labels.csv";
  }
  io::write_manifest_file(fs::path(args.out) / "manifest.json", m);
  out << "preprocessed " << m.m << " kernels into " << args.out << '\n';
  return 0;
}

int run_eval(const EvalArgs& args, std::ostream& out) {
  const auto pred = ClusterAssignment::from_labels(io::read_labels(args.pred));
  const auto truth = ClusterAssignment::from_labels(io::read_labels(args.truth));
  const MetricReport m = evaluate(pred, truth);
  out << std::setprecision(17) << "acc " << m.acc << "\nnmi " << m.nmi << "\npurity " << m.purity
      << "\nari " << m.ari << '\n';
  if (!args.out.empty()) {
    io::RunResult r;
    r.algorithm = "eval";
    r.labels = pred.labels();
    r.metrics = to_run_metrics(m);
    r.converged = true;
    io::write_run_result(args.out, r);
  }
  return 0;
}

void inspect_one(const std::string& label, const Matrix& m, std::ostream& out) {
  out << label << ": ";
  if (m.rows() != m.cols()) {
    out << "not square (" << m.rows() << "x" << m.cols() << ")\n";
    return;
  }
  const double asym = m.size() ? (m - m.transpose()).cwiseAbs().maxCoeff() : 0.0;
  const Vector ev = symmetric_eigenvalues(symmetrize(m));
  out << std::setprecision(6) << "n=" << m.rows() << " min_eig=" << ev.minCoeff()
      << " max_eig=" << ev.maxCoeff() << " diag=[" << m.diagonal().minCoeff() << ", "
      << m.diagonal().maxCoeff() << "] symmetry_residual=" << asym << '\n';
}

int run_inspect(const InspectArgs& args, std::ostream& out) {
  if (args.data.empty() && args.kernels.empty()) {
    throw ParameterError("inspect needs --data or --kernel");
  }
  if (!args.data.empty()) {
    const auto manifest = io::read_manifest_file(args.data);
    const fs::path base = fs::path(args.data).parent_path();
    for (const auto& rel : manifest.kernel_paths) inspect_one(rel, io::read_matrix(base / rel), out);
  }
  for (const auto& file : args.kernels) inspect_one(file, io::read_matrix(file), out);
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  log::init_from_env();
  CLI::App app{"Multiple kernel clustering with a learned neighborhood kernel", "lswmkc"};
  app.require_subcommand(1);

  ClusterArgs cluster;
  auto* cmd_cluster = app.add_subcommand("cluster", "Cluster a dataset manifest");
  cmd_cluster->add_option("--algo", cluster.algo, "lswmkc | avgkkm | mkkm | knn")
      ->check(CLI::IsMember({"lswmkc", "avgkkm", "mkkm", "knn"}));
  cmd_cluster->add_option("--data", cluster.data, "Dataset manifest (JSON)")->required();
  cmd_cluster->add_option("--clusters", cluster.clusters, "Cluster count (default: manifest k)");
  auto* alpha_opt = cmd_cluster->add_option("--alpha", cluster.alpha, "Neighborhood-kernel weight");
  auto* grid_opt = cmd_cluster->add_flag("--grid-alpha", cluster.grid_alpha, "Sweep alpha over 2^0..2^10");
  alpha_opt->excludes(grid_opt);
  cmd_cluster->add_option("--neighbors", cluster.neighbors, "Initial neighbors c")->capture_default_str();
  auto* tau_opt = cmd_cluster->add_option("--tau", cluster.tau, "KNN neighbor ratio");
  auto* tau_grid_opt = cmd_cluster->add_option("--tau-grid", cluster.tau_grid, "KNN ratio grid A:B:STEP");
  tau_opt->excludes(tau_grid_opt);
  cmd_cluster->add_option("--restarts", cluster.restarts, "k-means restarts")->capture_default_str();
  cmd_cluster->add_option("--max-iter", cluster.max_iter, "Maximum solver sweeps")->capture_default_str();
  cmd_cluster->add_option("--tol", cluster.tol, "Relative objective tolerance")->capture_default_str();
  cmd_cluster->add_option("--seed", cluster.seed, "Random seed")->capture_default_str();
  cmd_cluster->add_option("--threads", cluster.threads, "Worker threads (0 = auto)")->capture_default_str();
  cmd_cluster->add_option("--out", cluster.out, "Run result JSON path");
  cmd_cluster->add_option("--dump-matrices", cluster.dump_dir, "Directory for CSV matrix dumps");
  cmd_cluster->add_flag("--normalize-rows", cluster.normalize_rows,
                        "Row-normalize the spectral embedding before k-means");

  SynthArgs synth;
  auto* cmd_synth = app.add_subcommand("synth", "Generate a synthetic multi-kernel dataset");
  cmd_synth->add_option("--per-cluster", synth.spec.per_cluster, "Samples per cluster")->capture_default_str();
  cmd_synth->add_option("--clusters", synth.spec.clusters, "Cluster count")->capture_default_str();
  cmd_synth->add_option("--dims", synth.spec.dims, "Feature dimensions (>= clusters)")->capture_default_str();
  cmd_synth->add_option("--separation", synth.spec.separation, "Distance between cluster means")->capture_default_str();
  cmd_synth->add_option("--kernels", synth.spec.kernels, "Total kernel count")->capture_default_str();
  cmd_synth->add_option("--noise-kernels", synth.spec.noise_kernels, "Kernels built from shuffled features")->capture_default_str();
  cmd_synth->add_option("--perturbation", synth.spec.perturbation, "Per-view feature noise")->capture_default_str();
  cmd_synth->add_option("--seed", synth.spec.seed, "Random seed")->capture_default_str();
  cmd_synth->add_option("--name", synth.name, "Dataset name")->capture_default_str();
  cmd_synth->add_option("--out", synth.out, "Output directory")->required();

  PreprocessArgs pre;
  auto* cmd_pre = app.add_subcommand("preprocess", "Center and normalize every kernel of a dataset");
  cmd_pre->add_option("--data", pre.data, "Dataset manifest")->required();
  cmd_pre->add_option("--out", pre.out, "Output directory")->required();
  cmd_pre->add_flag("--binary", pre.binary, "Write KMX1 binary kernels");

  EvalArgs eval;
  auto* cmd_eval = app.add_subcommand("eval", "Score predicted labels against ground truth");
  cmd_eval->add_option("--pred", eval.pred, "Predicted labels, one per line")->required();
  cmd_eval->add_option("--truth", eval.truth, "True labels, one per line")->required();
  cmd_eval->add_option("--out", eval.out, "Run result JSON path");

  InspectArgs inspect;
  auto* cmd_inspect = app.add_subcommand("inspect", "Report kernel statistics");
  cmd_inspect->add_option("--data", inspect.data, "Dataset manifest");
  cmd_inspect->add_option("--kernel", inspect.kernels, "Kernel file (CSV or KMX1)");

  std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    if (*cmd_cluster) return run_cluster(cluster, out);
    if (*cmd_synth) return run_synth(synth, out);
    if (*cmd_pre) return run_preprocess(pre, out);
    if (*cmd_eval) return run_eval(eval, out);
    if (*cmd_inspect) return run_inspect(inspect, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}

}  // namespace lswmkc
