#include "erase/propagation.hpp"

#include <stdexcept>

namespace erase {

Eigen::MatrixXd init_label_matrix(const std::vector<int>& labels, int num_classes,
                                  const std::vector<bool>& mask) {
  if (mask.size() != labels.size())
    throw std::runtime_error("propagation: mask size mismatch");
  const int n = static_cast<int>(labels.size());
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, num_classes);
  for (int i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    if (labels[i] < 0 || labels[i] >= num_classes)
      throw std::runtime_error("propagation: label out of range");
    l(i, labels[i]) = 1.0;
  }
  return l;
}

Eigen::MatrixXd propagate(const SparseAdjacency& adj, Eigen::MatrixXd labels,
                          double alpha, int steps) {
  if (steps < 0) throw std::runtime_error("propagation: steps must be non-negative");
  if (labels.rows() != adj.n)
    throw std::runtime_error("propagation: label matrix row count mismatch");
  for (int t = 0; t < steps; ++t)
    labels = (1.0 - alpha) * adj.multiply(labels) + alpha * labels;
  return labels;
}

Eigen::MatrixXd denoise_labels(const SparseAdjacency& adj, const std::vector<bool>& mask,
                               const Eigen::MatrixXd& labels, double alpha, int steps) {
  const SparseAdjacency norm =
      symmetric_normalize(masked_adjacency(adj, mask), /*add_self_loops=*/false);
  return propagate(norm, labels, alpha, steps);
}

Eigen::MatrixXd semantic_propagate(const SparseAdjacency& adj,
                                   const Eigen::MatrixXd& labels, double alpha,
                                   int steps) {
  const SparseAdjacency norm = symmetric_normalize(adj, /*add_self_loops=*/false);
  return propagate(norm, labels, alpha, steps);
}

Membership to_membership(const Eigen::MatrixXd& labels, int num_classes) {
  Membership m;
  m.assignment.resize(labels.rows());
  m.counts.assign(num_classes, 0);
  for (int i = 0; i < labels.rows(); ++i) {
    int best = 0;
    for (int j = 1; j < labels.cols(); ++j)
      if (labels(i, j) > labels(i, best)) best = j;
    if (best >= num_classes)
      throw std::runtime_error("propagation: membership class out of range");
    m.assignment[i] = best;
    m.counts[best]++;
  }
  return m;
}

}  // namespace erase
