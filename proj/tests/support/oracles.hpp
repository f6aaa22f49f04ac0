#pragma once

// Reference implementations the test suites compare the library against.
// Everything here is deliberately naive: dense matrices, explicit matrix
// powers, eigenvalue-based log-determinants, and central finite differences.
// None of it shares code with the library's own numerics.

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "erase/random.hpp"

namespace oracle {

// D^{-1/2} (A [+ I]) D^{-1/2} on a dense matrix; zero-degree rows stay zero.
inline Eigen::MatrixXd normalize_dense(Eigen::MatrixXd a, bool self_loops) {
  const Eigen::Index n = a.rows();
  if (self_loops) a += Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd deg = a.rowwise().sum();
  Eigen::VectorXd inv(n);
  for (Eigen::Index i = 0; i < n; ++i)
    inv[i] = deg[i] > 0.0 ? 1.0 / std::sqrt(deg[i]) : 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) *= inv[i] * inv[j];
  return a;
}

// ((1 - alpha) A + alpha I)^steps L by explicit matrix power.
inline Eigen::MatrixXd propagate_dense(const Eigen::MatrixXd& a,
                                       const Eigen::MatrixXd& l, double alpha,
                                       int steps) {
  const Eigen::Index n = a.rows();
  const Eigen::MatrixXd op =
      (1.0 - alpha) * a + alpha * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
  for (int t = 0; t < steps; ++t) power = op * power;
  return power * l;
}

// A restricted to rows and columns inside the mask.
inline Eigen::MatrixXd mask_dense(Eigen::MatrixXd a, const std::vector<bool>& mask) {
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (!mask[i] || !mask[j]) a(i, j) = 0.0;
  return a;
}

// 1/2 logdet(I + c Z^T Z) through the eigenvalues of the gram matrix.
inline double rate_eig(const Eigen::MatrixXd& z, double eps_sq) {
  const double n = static_cast<double>(z.rows());
  const double d = static_cast<double>(z.cols());
  const double c = d / (n * eps_sq);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(z.transpose() * z);
  double total = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i)
    total += 0.5 * std::log1p(c * std::max(0.0, eig.eigenvalues()[i]));
  return total;
}

inline double rate_per_class_eig(const Eigen::MatrixXd& z,
                                 const std::vector<int>& assignment, int num_classes,
                                 double eps_sq) {
  const double n = static_cast<double>(z.rows());
  const double d = static_cast<double>(z.cols());
  double total = 0.0;
  for (int j = 0; j < num_classes; ++j) {
    std::vector<int> rows;
    for (std::size_t i = 0; i < assignment.size(); ++i)
      if (assignment[i] == j) rows.push_back(static_cast<int>(i));
    if (rows.empty()) continue;
    Eigen::MatrixXd zj(rows.size(), z.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) zj.row(r) = z.row(rows[r]);
    const double nj = static_cast<double>(rows.size());
    const double cj = d / (nj * eps_sq);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(zj.transpose() * zj);
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i)
      logdet += std::log1p(cj * std::max(0.0, eig.eigenvalues()[i]));
    total += (nj / (2.0 * n)) * logdet;
  }
  return total;
}

inline double delta_r_eig(const Eigen::MatrixXd& z, const std::vector<int>& assignment,
                          int num_classes, double eps_sq, double gamma) {
  return gamma * rate_eig(z, eps_sq) -
         rate_per_class_eig(z, assignment, num_classes, eps_sq);
}

// Central finite differences of a scalar function over a matrix argument.
template <typename F>
Eigen::MatrixXd fd_gradient(const Eigen::MatrixXd& x0, F f, double h) {
  Eigen::MatrixXd g(x0.rows(), x0.cols());
  Eigen::MatrixXd x = x0;
  for (Eigen::Index i = 0; i < x0.rows(); ++i) {
    for (Eigen::Index j = 0; j < x0.cols(); ++j) {
      x(i, j) = x0(i, j) + h;
      const double up = f(x);
      x(i, j) = x0(i, j) - h;
      const double down = f(x);
      x(i, j) = x0(i, j);
      g(i, j) = (up - down) / (2.0 * h);
    }
  }
  return g;
}

inline double rel_error(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  const double denom = std::max(want.norm(), 1e-300);
  return (got - want).norm() / denom;
}

// Test data helpers. These use the library's deterministic draws, which is
// fine: only the math under comparison must stay independent.

inline Eigen::MatrixXd random_matrix(int rows, int cols, std::mt19937_64& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = erase::gaussian(rng);
  return m;
}

inline std::vector<int> random_assignment(int n, int num_classes,
                                          std::mt19937_64& rng) {
  std::vector<int> a(n);
  for (int i = 0; i < n; ++i) a[i] = erase::uniform_int(rng, num_classes);
  return a;
}

inline Eigen::MatrixXd random_symmetric_adjacency(int n, double p,
                                                  std::mt19937_64& rng) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (erase::canonical(rng) < p) a(i, j) = a(j, i) = 1.0;
  return a;
}

inline std::vector<std::pair<int, int>> edges_of_dense(const Eigen::MatrixXd& a) {
  std::vector<std::pair<int, int>> edges;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = i + 1; j < a.cols(); ++j)
      if (a(i, j) != 0.0) edges.push_back({static_cast<int>(i), static_cast<int>(j)});
  return edges;
}

}  // namespace oracle
