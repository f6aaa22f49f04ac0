#pragma once

#include <Eigen/Dense>
#include <vector>

namespace erase {

// Numerically stable row-wise softmax.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);

// Rows scaled to unit euclidean norm; zero rows stay zero. The rate
// objective is free to grow representation magnitudes, so probes fit on
// directions to keep fixed-step gradient descent well conditioned.
Eigen::MatrixXd normalize_rows(const Eigen::MatrixXd& x);

// Full-batch gradient descent on mean cross-entropy plus l2 * ||W||_F^2.
// No bias term; W starts at zero, making the fit deterministic.
struct LogregConfig {
  double l2 = 1e-4;
  int iters = 500;
  double lr = 0.1;
};

Eigen::MatrixXd fit_logreg(const Eigen::MatrixXd& x, const std::vector<int>& labels,
                           int num_classes, const LogregConfig& cfg = {},
                           std::vector<double>* loss_history = nullptr);

// Row argmax of x * w; ties resolve to the lowest class index.
std::vector<int> predict(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w);

double accuracy(const std::vector<int>& pred, const std::vector<int>& labels,
                const std::vector<bool>& mask);

}  // namespace erase
