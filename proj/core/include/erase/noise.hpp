#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "erase/graph.hpp"

namespace erase {

enum class NoiseKind { symmetric, asymmetric };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::symmetric;
  double rate = 0.0;  // in [0, 1]
  std::uint64_t seed = 0;
};

// Row-stochastic K x K transition matrix Q, Q(i, j) = P(observed j | true i).
// symmetric: diag 1 - rate, off-diagonal rate / (K - 1).
// asymmetric: diag 1 - rate, mass rate on the circular successor (i + 1) mod K.
// Requires K >= 2.
Eigen::MatrixXd transition_matrix(NoiseKind kind, double rate, int num_classes);

// Resamples each masked label independently from its Q row. Nodes outside the
// mask keep their label and consume no randomness, so the corrupted set for a
// given seed is stable under mask-preserving changes elsewhere.
std::vector<int> corrupt_labels(const std::vector<int>& labels, int num_classes,
                                const std::vector<bool>& mask, const NoiseSpec& spec);

}  // namespace erase
