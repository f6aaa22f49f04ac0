#include "erase/semantics.hpp"

#include <cmath>
#include <stdexcept>

namespace erase {

PrototypeSet estimate_prototypes(const Eigen::MatrixXd& z,
                                 const std::vector<int>& assignment,
                                 const std::vector<bool>& mask, int num_classes) {
  if (assignment.size() != mask.size() ||
      static_cast<Eigen::Index>(assignment.size()) != z.rows())
    throw std::runtime_error("semantics: assignment size mismatch");
  PrototypeSet protos;
  protos.centers = Eigen::MatrixXd::Zero(num_classes, z.cols());
  protos.populated.assign(num_classes, false);
  std::vector<int> counts(num_classes, 0);
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    if (!mask[i]) continue;
    const int j = assignment[i];
    if (j < 0 || j >= num_classes)
      throw std::runtime_error("semantics: class assignment out of range");
    protos.centers.row(j) += z.row(i);
    counts[j]++;
  }
  for (int j = 0; j < num_classes; ++j) {
    if (counts[j] == 0) continue;
    protos.centers.row(j) /= counts[j];
    protos.populated[j] = true;
  }
  return protos;
}

Eigen::MatrixXd prototype_cosine(const Eigen::MatrixXd& z, const PrototypeSet& protos) {
  if (protos.centers.cols() != z.cols())
    throw std::runtime_error("semantics: prototype dimension mismatch");
  const int k = static_cast<int>(protos.centers.rows());
  Eigen::VectorXd center_norms(k);
  for (int j = 0; j < k; ++j) center_norms[j] = protos.centers.row(j).norm();

  Eigen::MatrixXd cos(z.rows(), k);
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double zn = z.row(i).norm();
    for (int j = 0; j < k; ++j) {
      if (!protos.populated[j]) {
        cos(i, j) = -1.0;
      } else if (zn == 0.0 || center_norms[j] == 0.0) {
        cos(i, j) = 0.0;
      } else {
        cos(i, j) = z.row(i).dot(protos.centers.row(j)) / (zn * center_norms[j]);
      }
    }
  }
  return cos;
}

Eigen::MatrixXd prototype_pseudo_labels(const Eigen::MatrixXd& z,
                                        const PrototypeSet& protos) {
  Eigen::MatrixXd scores = prototype_cosine(z, protos);
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const double mx = scores.row(i).maxCoeff();
    Eigen::ArrayXd e = (scores.row(i).array() - mx).exp();
    scores.row(i) = (e / e.sum()).matrix();
  }
  return scores;
}

Eigen::MatrixXd semantic_mix(const Eigen::MatrixXd& proto_labels,
                             const Eigen::MatrixXd& denoised, double beta) {
  if (proto_labels.rows() != denoised.rows() || proto_labels.cols() != denoised.cols())
    throw std::runtime_error("semantics: mix shape mismatch");
  return (1.0 - beta) * proto_labels + beta * denoised;
}

std::vector<int> nearest_prototype(const Eigen::MatrixXd& z, const PrototypeSet& protos) {
  const Eigen::MatrixXd cos = prototype_cosine(z, protos);
  std::vector<int> out(cos.rows());
  for (Eigen::Index i = 0; i < cos.rows(); ++i) {
    int best = 0;
    for (int j = 1; j < cos.cols(); ++j)
      if (cos(i, j) > cos(i, best)) best = j;
    out[i] = best;
  }
  return out;
}

}  // namespace erase
