#pragma once

#include <Eigen/Dense>
#include <vector>

#include "erase/graph.hpp"

namespace erase {

// One-hot rows for masked nodes, zero rows elsewhere. N x K.
Eigen::MatrixXd init_label_matrix(const std::vector<int>& labels, int num_classes,
                                  const std::vector<bool>& mask);

// steps applications of L <- (1 - alpha) * adj * L + alpha * L, i.e.
// ((1 - alpha) * adj + alpha * I)^steps * L. adj is expected to be already
// normalized. Negative step counts throw.
Eigen::MatrixXd propagate(const SparseAdjacency& adj, Eigen::MatrixXd labels,
                          double alpha, int steps);

// Stage one: propagation restricted to masked nodes over
// D^{-1/2} (A . m m^T) D^{-1/2}, no self-loops.
Eigen::MatrixXd denoise_labels(const SparseAdjacency& adj, const std::vector<bool>& mask,
                               const Eigen::MatrixXd& labels, double alpha, int steps);

// Stage two: propagation over the full D^{-1/2} A D^{-1/2}, no self-loops.
Eigen::MatrixXd semantic_propagate(const SparseAdjacency& adj,
                                   const Eigen::MatrixXd& labels, double alpha,
                                   int steps);

// Hard assignment by row argmax; ties and all-zero rows resolve to the
// lowest class index.
struct Membership {
  std::vector<int> assignment;
  std::vector<int> counts;
};

Membership to_membership(const Eigen::MatrixXd& labels, int num_classes);

}  // namespace erase
