#include "erase/noise.hpp"

#include <random>
#include <stdexcept>

#include "erase/random.hpp"

namespace erase {

Eigen::MatrixXd transition_matrix(NoiseKind kind, double rate, int num_classes) {
  if (num_classes < 2)
    throw std::runtime_error("noise: transition matrix needs at least 2 classes");
  if (rate < 0.0 || rate > 1.0)
    throw std::runtime_error("noise: rate must lie in [0, 1]");

  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(num_classes, num_classes);
  if (kind == NoiseKind::symmetric) {
    const double off = rate / (num_classes - 1);
    q.setConstant(off);
    q.diagonal().setConstant(1.0 - rate);
  } else {
    for (int i = 0; i < num_classes; ++i) {
      q(i, i) = 1.0 - rate;
      q(i, (i + 1) % num_classes) = rate;
    }
  }
  return q;
}

std::vector<int> corrupt_labels(const std::vector<int>& labels, int num_classes,
                                const std::vector<bool>& mask, const NoiseSpec& spec) {
  if (mask.size() != labels.size())
    throw std::runtime_error("noise: mask size mismatch");
  const Eigen::MatrixXd q = transition_matrix(spec.kind, spec.rate, num_classes);
  std::mt19937_64 rng(spec.seed);

  std::vector<int> out = labels;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!mask[i]) continue;
    const int y = labels[i];
    if (y < 0 || y >= num_classes)
      throw std::runtime_error("noise: label out of range");
    const double u = canonical(rng);
    double cum = 0.0;
    int pick = num_classes - 1;
    for (int j = 0; j < num_classes; ++j) {
      cum += q(y, j);
      if (u < cum) {
        pick = j;
        break;
      }
    }
    out[i] = pick;
  }
  return out;
}

}  // namespace erase
