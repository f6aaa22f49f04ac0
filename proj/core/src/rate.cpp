#include "erase/rate.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace erase {

namespace {

constexpr double kEigenFloor = 1e-12;

void check_inputs(const Eigen::MatrixXd& z, double epsilon_sq) {
  if (z.rows() == 0 || z.cols() == 0)
    throw std::runtime_error("rate: representation matrix is empty");
  if (epsilon_sq <= 0.0) throw std::runtime_error("rate: epsilon_sq must be positive");
}

// logdet(I + c Z^T Z) via Cholesky; the argument is SPD for c > 0.
double logdet_regularized_gram(const Eigen::MatrixXd& z, double c,
                               Eigen::LLT<Eigen::MatrixXd>* factor = nullptr) {
  const int d = static_cast<int>(z.cols());
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(d, d);
  m.noalias() += c * (z.transpose() * z);
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("rate: Cholesky factorization failed");
  double logdet = 0.0;
  for (int i = 0; i < d; ++i) logdet += std::log(llt.matrixLLT()(i, i));
  logdet *= 2.0;
  if (factor) *factor = std::move(llt);
  return logdet;
}

std::vector<std::vector<int>> class_rows(const Membership& membership) {
  std::vector<std::vector<int>> rows(membership.counts.size());
  for (std::size_t j = 0; j < rows.size(); ++j) rows[j].reserve(membership.counts[j]);
  for (std::size_t i = 0; i < membership.assignment.size(); ++i)
    rows[membership.assignment[i]].push_back(static_cast<int>(i));
  return rows;
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& z, const std::vector<int>& rows) {
  Eigen::MatrixXd out(rows.size(), z.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(r) = z.row(rows[r]);
  return out;
}

}  // namespace

double coding_rate(const Eigen::MatrixXd& z, double epsilon_sq) {
  check_inputs(z, epsilon_sq);
  const double n = static_cast<double>(z.rows());
  const double d = static_cast<double>(z.cols());
  const double c = d / (n * epsilon_sq);
  return 0.5 * logdet_regularized_gram(z, c);
}

double coding_rate_per_class(const Eigen::MatrixXd& z, const Membership& membership,
                             double epsilon_sq) {
  check_inputs(z, epsilon_sq);
  if (static_cast<Eigen::Index>(membership.assignment.size()) != z.rows())
    throw std::runtime_error("rate: membership size mismatch");
  const double n = static_cast<double>(z.rows());
  const double d = static_cast<double>(z.cols());

  double total = 0.0;
  for (const auto& rows : class_rows(membership)) {
    if (rows.empty()) continue;
    const double nj = static_cast<double>(rows.size());
    const double cj = d / (nj * epsilon_sq);
    const Eigen::MatrixXd zj = gather_rows(z, rows);
    total += (nj / (2.0 * n)) * logdet_regularized_gram(zj, cj);
  }
  return total;
}

double delta_r(const Eigen::MatrixXd& z, const Membership& membership,
               const RateConfig& cfg) {
  return cfg.gamma * coding_rate(z, cfg.epsilon_sq) -
         coding_rate_per_class(z, membership, cfg.epsilon_sq);
}

Eigen::MatrixXd delta_r_gradient(const Eigen::MatrixXd& z, const Membership& membership,
                                 const RateConfig& cfg) {
  check_inputs(z, cfg.epsilon_sq);
  if (static_cast<Eigen::Index>(membership.assignment.size()) != z.rows())
    throw std::runtime_error("rate: membership size mismatch");
  const double n = static_cast<double>(z.rows());
  const double d = static_cast<double>(z.cols());
  const double c = d / (n * cfg.epsilon_sq);

  Eigen::LLT<Eigen::MatrixXd> llt;
  logdet_regularized_gram(z, c, &llt);
  Eigen::MatrixXd grad = cfg.gamma * c * llt.solve(z.transpose()).transpose();

  for (const auto& rows : class_rows(membership)) {
    if (rows.empty()) continue;
    const double nj = static_cast<double>(rows.size());
    const double cj = d / (nj * cfg.epsilon_sq);
    const Eigen::MatrixXd zj = gather_rows(z, rows);
    Eigen::LLT<Eigen::MatrixXd> llt_j;
    logdet_regularized_gram(zj, cj, &llt_j);
    // (n_j / n) * c_j collapses to c, the same leading constant as the
    // global term.
    const Eigen::MatrixXd gj = c * llt_j.solve(zj.transpose()).transpose();
    for (std::size_t r = 0; r < rows.size(); ++r) grad.row(rows[r]) -= gj.row(r);
  }
  return grad;
}

LogVolume log_volume(const Eigen::MatrixXd& z) {
  if (z.rows() == 0 || z.cols() == 0)
    throw std::runtime_error("rate: representation matrix is empty");
  const Eigen::MatrixXd centered = z.rowwise() - z.colwise().mean();
  const Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(z.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("rate: eigendecomposition failed");

  LogVolume lv;
  for (int i = 0; i < eig.eigenvalues().size(); ++i) {
    double lambda = eig.eigenvalues()[i];
    if (lambda < kEigenFloor) {
      lambda = kEigenFloor;
      lv.rank_deficient = true;
    }
    lv.value += 0.5 * std::log(lambda);
  }
  return lv;
}

double gaussian_log_volume(int dim, double epsilon_sq) {
  if (dim <= 0) throw std::runtime_error("rate: dimension must be positive");
  if (epsilon_sq <= 0.0) throw std::runtime_error("rate: epsilon_sq must be positive");
  return 0.5 * dim * std::log(epsilon_sq / dim);
}

double ntvr(const Eigen::MatrixXd& delta, double epsilon_sq) {
  if (delta.isZero(0.0)) return 0.0;
  const LogVolume lv = log_volume(delta);
  return std::exp(lv.value - gaussian_log_volume(static_cast<int>(delta.cols()),
                                                 epsilon_sq));
}

}  // namespace erase
