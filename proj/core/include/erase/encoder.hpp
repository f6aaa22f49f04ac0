#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "erase/graph.hpp"

namespace erase {

struct AdamMoments {
  Eigen::MatrixXd m;
  Eigen::MatrixXd v;
};

AdamMoments zero_moments(Eigen::Index rows, Eigen::Index cols);

// One Adam update with decoupled-from-nothing classic L2: the decay term is
// added to the gradient before the moment updates. step is 1-based and shared
// across all parameters of a model so bias correction stays in sync.
void adam_update(Eigen::MatrixXd& param, AdamMoments& mom, const Eigen::MatrixXd& grad,
                 double lr, double weight_decay, long step);

// Two-layer graph convolution: Z = A (relu(A X W1)) W2 with A the
// self-loop-augmented symmetric normalization of the adjacency.
struct EncoderState {
  Eigen::MatrixXd w1;  // in_dim x hidden_dim
  Eigen::MatrixXd w2;  // hidden_dim x out_dim
  AdamMoments m1;
  AdamMoments m2;
  long step = 0;
};

struct ForwardCache {
  Eigen::MatrixXd h1_pre;  // A X W1
  Eigen::MatrixXd h1;      // relu(h1_pre)
  Eigen::MatrixXd z;       // A h1 W2
};

struct EncoderGradients {
  Eigen::MatrixXd w1;
  Eigen::MatrixXd w2;
};

// Glorot-uniform init, bounds +- sqrt(6 / (fan_in + fan_out)).
EncoderState init_encoder(int in_dim, int hidden_dim, int out_dim, std::uint64_t seed);

ForwardCache encoder_forward(const SparseAdjacency& adj_norm, const Eigen::MatrixXd& x,
                             const EncoderState& enc);

// z_grad is the gradient of a scalar loss with respect to Z. Relies on the
// adjacency being symmetric.
EncoderGradients encoder_backward(const SparseAdjacency& adj_norm,
                                  const Eigen::MatrixXd& x, const ForwardCache& cache,
                                  const EncoderState& enc, const Eigen::MatrixXd& z_grad);

// Advances the shared step counter once and updates both layers.
void adam_step(EncoderState& enc, const EncoderGradients& grads, double lr,
               double weight_decay);

// Binary checkpoint with encoder weights and an optional linear head.
// Holds inference state only; optimizer moments are not persisted.
struct Checkpoint {
  EncoderState encoder;
  std::optional<Eigen::MatrixXd> head;  // out_dim x num_classes
};

void save_checkpoint(const std::string& path, const EncoderState& enc,
                     const Eigen::MatrixXd* head = nullptr);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace erase
