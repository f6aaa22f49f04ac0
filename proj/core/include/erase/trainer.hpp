#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "erase/encoder.hpp"
#include "erase/graph.hpp"
#include "erase/readout.hpp"

namespace erase {

enum class Objective {
  erase,       // rate-reduction objective with denoised and mixed semantic labels
  mcr2_plain,  // rate-reduction objective taking the observed train labels as-is
  ce_baseline  // cross-entropy on the observed train labels, linear head
};

struct RunConfig {
  Objective objective = Objective::erase;
  double lr = 1e-3;
  double weight_decay = 5e-4;
  int hidden_dim = 64;
  int out_dim = 64;
  double epsilon_sq = 0.05;
  double gamma = 2.0;
  int t1 = 5;
  int t2 = 5;
  double alpha1 = 0.6;
  double alpha2 = 0.6;
  double beta = 0.6;
  int max_epochs = 400;
  int patience = 150;  // <= 0 disables early stopping
  std::uint64_t seed = 0;
};

// State of the best validation epoch plus full per-epoch traces.
// objective_history records delta-R for the rate objectives and the negated
// train cross-entropy for ce_baseline, so "higher is better" holds throughout.
struct TrainOutput {
  EncoderState encoder;
  std::optional<Eigen::MatrixXd> head;  // present for ce_baseline
  Eigen::MatrixXd representations;      // N x out_dim, best epoch
  Eigen::MatrixXd semantic_labels;      // N x K soft labels driving the readout
  std::vector<double> objective_history;
  std::vector<double> val_acc_history;
  int best_epoch = 0;  // 1-based epoch index of the snapshot
};

// Trains on the bundle's labels as given (already corrupted upstream when
// noise is wanted). Validation always scores against the bundle's valid
// labels; test labels are never touched here.
TrainOutput run_training(const GraphBundle& bundle, const RunConfig& cfg);

// Test accuracy of a finished run. ce_baseline predicts through its head;
// the rate objectives fit a logistic probe on the train rows of the stored
// representations against the argmax of the stored semantic labels.
double evaluate_test_accuracy(const GraphBundle& bundle, const TrainOutput& out,
                              const LogregConfig& probe = {});

// Predictions for every node under the same readout rule.
std::vector<int> evaluate_predictions(const GraphBundle& bundle, const TrainOutput& out,
                                      const LogregConfig& probe = {});

}  // namespace erase
