#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "erase/semantics.hpp"

namespace erase {

// Picks up to max(1, cap / num_classes) nodes per class, uniformly without
// replacement, then orders the result by (class, node id) so downstream
// matrices expose visible block structure.
std::vector<int> stratified_sample(const std::vector<int>& labels, int num_classes,
                                   int cap, std::uint64_t seed);

// Same, restricted to nodes where mask holds.
std::vector<int> stratified_sample(const std::vector<int>& labels,
                                   const std::vector<bool>& mask, int num_classes,
                                   int cap, std::uint64_t seed);

// Pairwise cosine similarity over the selected rows. Zero-norm rows score 0
// against everything, including themselves.
Eigen::MatrixXd cosine_matrix(const Eigen::MatrixXd& z, const std::vector<int>& nodes);

// Projection onto the top two principal components of the selected rows.
// Component signs are fixed by making each component's largest-magnitude
// loading positive.
Eigen::MatrixXd pca_2d(const Eigen::MatrixXd& z, const std::vector<int>& nodes);

// Largest |cos| over distinct populated prototype pairs; 0 when fewer than
// two prototypes are populated.
double max_prototype_cosine(const PrototypeSet& protos);

}  // namespace erase
