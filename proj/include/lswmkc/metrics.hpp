#pragma once

#include <vector>

#include "lswmkc/assignment.hpp"

namespace lswmkc {

// counts(a, b) = #samples with predicted label a and true label b.
class ContingencyTable {
 public:
  ContingencyTable(const ClusterAssignment& pred, const ClusterAssignment& truth);

  int pred_clusters() const { return rows_; }
  int true_classes() const { return cols_; }
  long long total() const { return total_; }
  long long operator()(int a, int b) const { return counts_[static_cast<size_t>(a * cols_ + b)]; }
  std::vector<long long> pred_sums() const;
  std::vector<long long> true_sums() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  long long total_ = 0;
  std::vector<long long> counts_;
};

enum class NmiNormalization { kGeometric, kArithmetic, kMin, kMax };

struct AriResult {
  double value = 0.0;
  bool degenerate = false;  // max index == expected index; value defined as 0
};

// Best one-to-one matching of predicted clusters to classes (Kuhn-Munkres).
double accuracy(const ClusterAssignment& pred, const ClusterAssignment& truth);

double nmi(const ClusterAssignment& pred, const ClusterAssignment& truth,
           NmiNormalization norm = NmiNormalization::kGeometric);

double purity(const ClusterAssignment& pred, const ClusterAssignment& truth);

AriResult ari_detailed(const ClusterAssignment& pred, const ClusterAssignment& truth);
double ari(const ClusterAssignment& pred, const ClusterAssignment& truth);

struct MetricReport {
  double acc = 0.0;
  double nmi = 0.0;
  double purity = 0.0;
  double ari = 0.0;
};

MetricReport evaluate(const ClusterAssignment& pred, const ClusterAssignment& truth);

// Minimum-cost perfect assignment on a square cost matrix (row-major, size
// n*n). Returns column index for each row.
std::vector<int> hungarian_min_cost(const std::vector<double>& cost, int n);

}  // namespace lswmkc
