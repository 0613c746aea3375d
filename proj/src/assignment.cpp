#include "lswmkc/assignment.hpp"

#include <algorithm>
#include <sstream>

#include "lswmkc/errors.hpp"

namespace lswmkc {

ClusterAssignment::ClusterAssignment(std::vector<int> labels, int k) : labels_(std::move(labels)), k_(k) {
  if (k_ < 1) throw InputError("cluster count must be >= 1");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 0 || labels_[i] >= k_) {
      std::ostringstream msg;
      msg << "label " << labels_[i] << " at position " << i << " outside [0, " << k_ << ")";
      throw InputError(msg.str());
    }
  }
}

ClusterAssignment ClusterAssignment::from_labels(std::vector<int> labels) {
  int k = 1;
  for (int l : labels) k = std::max(k, l + 1);
  return ClusterAssignment(std::move(labels), k);
}

std::vector<std::size_t> ClusterAssignment::cluster_sizes() const {
  std::vector<std::size_t> sizes(static_cast<size_t>(k_), 0);
  for (int l : labels_) ++sizes[static_cast<size_t>(l)];
  return sizes;
}

bool ClusterAssignment::has_empty_cluster() const {
  const auto sizes = cluster_sizes();
  return std::find(sizes.begin(), sizes.end(), 0u) != sizes.end();
}

}  // namespace lswmkc
