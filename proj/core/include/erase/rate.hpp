#pragma once

#include <Eigen/Dense>

#include "erase/propagation.hpp"

namespace erase {

struct RateConfig {
  double epsilon_sq = 0.05;
  double gamma = 2.0;
};

// R(Z) = 1/2 logdet(I_d + c Z^T Z) with c = d / (N eps^2). Z is N x d with
// one representation per row.
double coding_rate(const Eigen::MatrixXd& z, double epsilon_sq);

// Sum over classes j of (n_j / 2N) logdet(I_d + c_j Z^T Pi_j Z) with
// c_j = d / (n_j eps^2). Empty classes contribute nothing.
double coding_rate_per_class(const Eigen::MatrixXd& z, const Membership& membership,
                             double epsilon_sq);

// Objective to maximize: gamma * R(Z) - R^c(Z | Pi).
double delta_r(const Eigen::MatrixXd& z, const Membership& membership,
               const RateConfig& cfg);

// Closed-form gradient of delta_r with respect to Z:
//   gamma * c * Z (I + c Z^T Z)^{-1}
//     - sum_j c * Pi_j Z (I + c_j Z^T Pi_j Z)^{-1}.
Eigen::MatrixXd delta_r_gradient(const Eigen::MatrixXd& z, const Membership& membership,
                                 const RateConfig& cfg);

// 1/2 logdet of the mean-centered covariance (1/N) Zc^T Zc, with eigenvalues
// floored at 1e-12. rank_deficient reports whether the floor was applied.
struct LogVolume {
  double value = 0.0;
  bool rank_deficient = false;
};

LogVolume log_volume(const Eigen::MatrixXd& z);

// Log-volume of the reference noise w ~ N(0, (eps^2 / d) I_d): (d/2) log(eps^2 / d).
double gaussian_log_volume(int dim, double epsilon_sq);

// Noise-to-tolerance volume ratio exp(logvol(delta) - logvol(w)). An exactly
// zero perturbation reports 0 rather than the floored ratio.
double ntvr(const Eigen::MatrixXd& delta, double epsilon_sq);

}  // namespace erase
