#include "erase/diagnostics.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "erase/random.hpp"

namespace erase {

std::vector<int> stratified_sample(const std::vector<int>& labels, int num_classes,
                                   int cap, std::uint64_t seed) {
  return stratified_sample(labels, std::vector<bool>(labels.size(), true),
                           num_classes, cap, seed);
}

std::vector<int> stratified_sample(const std::vector<int>& labels,
                                   const std::vector<bool>& mask, int num_classes,
                                   int cap, std::uint64_t seed) {
  if (cap <= 0) throw std::runtime_error("diagnostics: sample cap must be positive");
  if (mask.size() != labels.size())
    throw std::runtime_error("diagnostics: mask length mismatch");
  std::vector<std::vector<int>> by_class(num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes)
      throw std::runtime_error("diagnostics: label out of range");
    if (mask[i]) by_class[labels[i]].push_back(static_cast<int>(i));
  }

  const int quota = std::max(1, cap / num_classes);
  std::mt19937_64 rng(seed);
  std::vector<int> picked;
  for (int j = 0; j < num_classes; ++j) {
    auto& pool = by_class[j];
    for (int t = static_cast<int>(pool.size()) - 1; t > 0; --t)
      std::swap(pool[t], pool[uniform_int(rng, t + 1)]);
    const int take = std::min<int>(quota, static_cast<int>(pool.size()));
    std::sort(pool.begin(), pool.begin() + take);
    picked.insert(picked.end(), pool.begin(), pool.begin() + take);
  }
  return picked;
}

namespace {

Eigen::MatrixXd gather(const Eigen::MatrixXd& z, const std::vector<int>& nodes) {
  Eigen::MatrixXd out(nodes.size(), z.cols());
  for (std::size_t r = 0; r < nodes.size(); ++r) {
    if (nodes[r] < 0 || nodes[r] >= z.rows())
      throw std::runtime_error("diagnostics: node index out of range");
    out.row(r) = z.row(nodes[r]);
  }
  return out;
}

}  // namespace

Eigen::MatrixXd cosine_matrix(const Eigen::MatrixXd& z, const std::vector<int>& nodes) {
  const Eigen::MatrixXd rows = gather(z, nodes);
  const Eigen::Index m = rows.rows();
  Eigen::VectorXd norms(m);
  for (Eigen::Index i = 0; i < m; ++i) norms[i] = rows.row(i).norm();

  Eigen::MatrixXd cos = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (norms[i] == 0.0) continue;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (norms[j] == 0.0) continue;
      cos(i, j) = rows.row(i).dot(rows.row(j)) / (norms[i] * norms[j]);
    }
  }
  return cos;
}

Eigen::MatrixXd pca_2d(const Eigen::MatrixXd& z, const std::vector<int>& nodes) {
  const Eigen::MatrixXd rows = gather(z, nodes);
  if (rows.cols() < 2)
    throw std::runtime_error("diagnostics: need at least 2 dimensions for pca");
  const Eigen::MatrixXd centered = rows.rowwise() - rows.colwise().mean();
  const Eigen::MatrixXd cov =
      (centered.transpose() * centered) / std::max<double>(1.0, rows.rows() - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("diagnostics: eigendecomposition failed");

  // Eigenvalues come back ascending; the last two columns span the top plane.
  Eigen::MatrixXd basis(rows.cols(), 2);
  basis.col(0) = eig.eigenvectors().col(rows.cols() - 1);
  basis.col(1) = eig.eigenvectors().col(rows.cols() - 2);
  for (int c = 0; c < 2; ++c) {
    Eigen::Index argmax = 0;
    basis.col(c).cwiseAbs().maxCoeff(&argmax);
    if (basis(argmax, c) < 0.0) basis.col(c) = -basis.col(c);
  }
  return centered * basis;
}

double max_prototype_cosine(const PrototypeSet& protos) {
  const int k = static_cast<int>(protos.centers.rows());
  double worst = 0.0;
  for (int a = 0; a < k; ++a) {
    if (!protos.populated[a]) continue;
    const double na = protos.centers.row(a).norm();
    if (na == 0.0) continue;
    for (int b = a + 1; b < k; ++b) {
      if (!protos.populated[b]) continue;
      const double nb = protos.centers.row(b).norm();
      if (nb == 0.0) continue;
      const double c =
          std::abs(protos.centers.row(a).dot(protos.centers.row(b)) / (na * nb));
      worst = std::max(worst, c);
    }
  }
  return worst;
}

}  // namespace erase
