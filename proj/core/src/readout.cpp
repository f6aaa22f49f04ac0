#include "erase/readout.hpp"

#include <cmath>
#include <stdexcept>

namespace erase {

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double mx = logits.row(i).maxCoeff();
    Eigen::ArrayXd e = (logits.row(i).array() - mx).exp();
    p.row(i) = (e / e.sum()).matrix();
  }
  return p;
}

Eigen::MatrixXd normalize_rows(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out = x;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double n = out.row(i).norm();
    if (n > 0.0) out.row(i) /= n;
  }
  return out;
}

Eigen::MatrixXd fit_logreg(const Eigen::MatrixXd& x, const std::vector<int>& labels,
                           int num_classes, const LogregConfig& cfg,
                           std::vector<double>* loss_history) {
  if (static_cast<Eigen::Index>(labels.size()) != x.rows())
    throw std::runtime_error("readout: label count mismatch");
  if (x.rows() == 0) throw std::runtime_error("readout: no samples to fit");
  const Eigen::Index n = x.rows();

  Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(n, num_classes);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes)
      throw std::runtime_error("readout: label out of range");
    onehot(i, labels[i]) = 1.0;
  }

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(x.cols(), num_classes);
  if (loss_history) loss_history->clear();
  for (int it = 0; it < cfg.iters; ++it) {
    const Eigen::MatrixXd p = softmax_rows(x * w);
    if (loss_history) {
      double ce = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) ce -= std::log(p(i, labels[i]));
      loss_history->push_back(ce / static_cast<double>(n) +
                              cfg.l2 * w.squaredNorm());
    }
    const Eigen::MatrixXd grad =
        x.transpose() * (p - onehot) / static_cast<double>(n) + 2.0 * cfg.l2 * w;
    w -= cfg.lr * grad;
  }
  return w;
}

std::vector<int> predict(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w) {
  const Eigen::MatrixXd logits = x * w;
  std::vector<int> pred(logits.rows());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    int best = 0;
    for (Eigen::Index j = 1; j < logits.cols(); ++j)
      if (logits(i, j) > logits(i, best)) best = static_cast<int>(j);
    pred[i] = best;
  }
  return pred;
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& labels,
                const std::vector<bool>& mask) {
  if (pred.size() != labels.size() || pred.size() != mask.size())
    throw std::runtime_error("readout: accuracy size mismatch");
  long correct = 0;
  long total = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!mask[i]) continue;
    ++total;
    correct += (pred[i] == labels[i]);
  }
  if (total == 0) throw std::runtime_error("readout: empty evaluation mask");
  return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace erase
