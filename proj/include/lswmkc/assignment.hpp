#pragma once

#include <vector>

namespace lswmkc {

// Hard cluster labels in [0, k). Empty clusters are allowed.
class ClusterAssignment {
 public:
  ClusterAssignment() = default;
  // Throws InputError if any label lies outside [0, k) or k < 1.
  ClusterAssignment(std::vector<int> labels, int k);

  // Uses k = max(label) + 1.
  static ClusterAssignment from_labels(std::vector<int> labels);

  const std::vector<int>& labels() const { return labels_; }
  int num_clusters() const { return k_; }
  std::size_t size() const { return labels_.size(); }
  int operator[](std::size_t i) const { return labels_[i]; }

  std::vector<std::size_t> cluster_sizes() const;
  bool has_empty_cluster() const;

  friend bool operator==(const ClusterAssignment&, const ClusterAssignment&) = default;

 private:
  std::vector<int> labels_;
  int k_ = 0;
};

}  // namespace lswmkc
