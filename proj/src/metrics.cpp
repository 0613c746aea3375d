#include "lswmkc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lswmkc/errors.hpp"

namespace lswmkc {

namespace {

void check_pair(const ClusterAssignment& pred, const ClusterAssignment& truth) {
  if (pred.size() != truth.size()) {
    std::ostringstream msg;
    msg << "label length mismatch: " << pred.size() << " predicted vs " << truth.size() << " true";
    throw DimensionError(msg.str());
  }
  if (pred.size() == 0) throw InputError("cannot score an empty labeling");
}

double choose2(long long x) { return 0.5 * static_cast<double>(x) * static_cast<double>(x - 1); }

double entropy(const std::vector<long long>& sums, long long n) {
  double h = 0.0;
  for (long long s : sums) {
    if (s == 0) continue;
    const double p = static_cast<double>(s) / static_cast<double>(n);
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace

ContingencyTable::ContingencyTable(const ClusterAssignment& pred, const ClusterAssignment& truth)
    : rows_(pred.num_clusters()), cols_(truth.num_clusters()) {
  check_pair(pred, truth);
  counts_.assign(static_cast<size_t>(rows_) * static_cast<size_t>(cols_), 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ++counts_[static_cast<size_t>(pred[i] * cols_ + truth[i])];
  }
  total_ = static_cast<long long>(pred.size());
}

std::vector<long long> ContingencyTable::pred_sums() const {
  std::vector<long long> s(static_cast<size_t>(rows_), 0);
  for (int a = 0; a < rows_; ++a) {
    for (int b = 0; b < cols_; ++b) s[static_cast<size_t>(a)] += (*this)(a, b);
  }
  return s;
}

std::vector<long long> ContingencyTable::true_sums() const {
  std::vector<long long> s(static_cast<size_t>(cols_), 0);
  for (int a = 0; a < rows_; ++a) {
    for (int b = 0; b < cols_; ++b) s[static_cast<size_t>(b)] += (*this)(a, b);
  }
  return s;
}

// Shortest augmenting path with potentials, O(n^3).
std::vector<int> hungarian_min_cost(const std::vector<double>& cost, int n) {
  if (n < 0 || cost.size() != static_cast<size_t>(n) * static_cast<size_t>(n)) {
    throw DimensionError("hungarian: cost matrix is not n x n");
  }
  const double inf = std::numeric_limits<double>::infinity();
  const auto N = static_cast<size_t>(n);
  std::vector<double> u(N + 1, 0.0), v(N + 1, 0.0), minv(N + 1);
  std::vector<size_t> match(N + 1, 0), way(N + 1, 0);
  std::vector<char> used(N + 1);
  for (size_t row = 1; row <= N; ++row) {
    match[0] = row;
    size_t col0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[col0] = 1;
      const size_t r0 = match[col0];
      double delta = inf;
      size_t col1 = 0;
      for (size_t col = 1; col <= N; ++col) {
        if (used[col]) continue;
        const double cur = cost[(r0 - 1) * N + (col - 1)] - u[r0] - v[col];
        if (cur < minv[col]) {
          minv[col] = cur;
          way[col] = col0;
        }
        if (minv[col] < delta) {
          delta = minv[col];
          col1 = col;
        }
      }
      for (size_t col = 0; col <= N; ++col) {
        if (used[col]) {
          u[match[col]] += delta;
          v[col] -= delta;
        } else {
          minv[col] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const size_t col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<int> assignment(N, -1);
  for (size_t col = 1; col <= N; ++col) {
    if (match[col] != 0) assignment[match[col] - 1] = static_cast<int>(col - 1);
  }
  return assignment;
}

double accuracy(const ClusterAssignment& pred, const ClusterAssignment& truth) {
  const ContingencyTable table(pred, truth);
  const int size = std::max(table.pred_clusters(), table.true_classes());
  std::vector<double> cost(static_cast<size_t>(size) * static_cast<size_t>(size), 0.0);
  for (int a = 0; a < table.pred_clusters(); ++a) {
    for (int b = 0; b < table.true_classes(); ++b) {
      cost[static_cast<size_t>(a * size + b)] = -static_cast<double>(table(a, b));
    }
  }
  const auto match = hungarian_min_cost(cost, size);
  long long hits = 0;
  for (int a = 0; a < table.pred_clusters(); ++a) {
    const int b = match[static_cast<size_t>(a)];
    if (b < table.true_classes()) hits += table(a, b);
  }
  return static_cast<double>(hits) / static_cast<double>(table.total());
}

double nmi(const ClusterAssignment& pred, const ClusterAssignment& truth, NmiNormalization norm) {
  const ContingencyTable table(pred, truth);
  const long long n = table.total();
  const auto ps = table.pred_sums();
  const auto ts = table.true_sums();
  const double hp = entropy(ps, n);
  const double ht = entropy(ts, n);
  if (hp == 0.0 && ht == 0.0) return 1.0;

  const double dn = static_cast<double>(n);
  double mi = 0.0;
  for (int a = 0; a < table.pred_clusters(); ++a) {
    for (int b = 0; b < table.true_classes(); ++b) {
      const long long c = table(a, b);
      if (c == 0) continue;
      const double pab = static_cast<double>(c) / dn;
      mi += pab * std::log(static_cast<double>(c) * dn /
                           (static_cast<double>(ps[static_cast<size_t>(a)]) *
                            static_cast<double>(ts[static_cast<size_t>(b)])));
    }
  }
  double denom = 0.0;
  switch (norm) {
    case NmiNormalization::kGeometric: denom = std::sqrt(hp * ht); break;
    case NmiNormalization::kArithmetic: denom = 0.5 * (hp + ht); break;
    case NmiNormalization::kMin: denom = std::min(hp, ht); break;
    case NmiNormalization::kMax: denom = std::max(hp, ht); break;
  }
  if (denom <= 0.0) return 0.0;
  return std::clamp(mi / denom, 0.0, 1.0);
}

double purity(const ClusterAssignment& pred, const ClusterAssignment& truth) {
  const ContingencyTable table(pred, truth);
  long long hits = 0;
  for (int a = 0; a < table.pred_clusters(); ++a) {
    long long best = 0;
    for (int b = 0; b < table.true_classes(); ++b) best = std::max(best, table(a, b));
    hits += best;
  }
  return static_cast<double>(hits) / static_cast<double>(table.total());
}

AriResult ari_detailed(const ClusterAssignment& pred, const ClusterAssignment& truth) {
  const ContingencyTable table(pred, truth);
  double index = 0.0;
  for (int a = 0; a < table.pred_clusters(); ++a) {
    for (int b = 0; b < table.true_classes(); ++b) index += choose2(table(a, b));
  }
  double sum_pred = 0.0;
  for (long long s : table.pred_sums()) sum_pred += choose2(s);
  double sum_true = 0.0;
  for (long long s : table.true_sums()) sum_true += choose2(s);
  const double pairs = choose2(table.total());

  const double expected = pairs > 0.0 ? sum_pred * sum_true / pairs : 0.0;
  const double max_index = 0.5 * (sum_pred + sum_true);
  if (max_index == expected) return {0.0, true};
  return {(index - expected) / (max_index - expected), false};
}

double ari(const ClusterAssignment& pred, const ClusterAssignment& truth) {
  return ari_detailed(pred, truth).value;
}

MetricReport evaluate(const ClusterAssignment& pred, const ClusterAssignment& truth) {
  return {accuracy(pred, truth), nmi(pred, truth), purity(pred, truth), ari(pred, truth)};
}

}  // namespace lswmkc
