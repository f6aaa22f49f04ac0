#pragma once

#include <Eigen/Dense>
#include <vector>

namespace erase {

// Per-class mean representation over the masked nodes assigned to the class.
// Classes with no contributing node keep a zero row and populated = false.
struct PrototypeSet {
  Eigen::MatrixXd centers;  // num_classes x dim
  std::vector<bool> populated;
};

PrototypeSet estimate_prototypes(const Eigen::MatrixXd& z,
                                 const std::vector<int>& assignment,
                                 const std::vector<bool>& mask, int num_classes);

// Cosine similarity of every representation to every prototype. Zero-norm
// rows or centers score 0; unpopulated classes score -1 so the softmax and
// the nearest-prototype argmax push them below any real match.
Eigen::MatrixXd prototype_cosine(const Eigen::MatrixXd& z, const PrototypeSet& protos);

// Row-wise softmax over the raw cosine scores.
Eigen::MatrixXd prototype_pseudo_labels(const Eigen::MatrixXd& z,
                                        const PrototypeSet& protos);

// (1 - beta) * proto_labels + beta * denoised.
Eigen::MatrixXd semantic_mix(const Eigen::MatrixXd& proto_labels,
                             const Eigen::MatrixXd& denoised, double beta);

// Row argmax over cosine scores; ties resolve to the lowest class index.
std::vector<int> nearest_prototype(const Eigen::MatrixXd& z, const PrototypeSet& protos);

}  // namespace erase
