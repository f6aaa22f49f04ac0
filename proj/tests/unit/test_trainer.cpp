#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "erase/noise.hpp"
#include "erase/propagation.hpp"
#include "erase/trainer.hpp"

using erase::GraphBundle;
using erase::Objective;
using erase::RunConfig;
using erase::Split;
using erase::TrainOutput;

namespace {

GraphBundle small_sbm(std::uint64_t seed, double shift = 2.5) {
  erase::SbmConfig cfg;
  cfg.num_blocks = 3;
  cfg.nodes_per_block = 30;
  cfg.p_in = 0.3;
  cfg.p_out = 0.02;
  cfg.feature_dim = 12;
  cfg.feature_shift = shift;
  cfg.seed = seed;
  cfg.train_per_block = 10;
  cfg.valid_per_block = 6;
  return erase::generate_sbm(cfg);
}

// Well-separated blocks at a size where the masked training subgraph is
// connected enough for the denoising stage to matter.
GraphBundle separated_sbm(std::uint64_t seed) {
  erase::SbmConfig cfg;
  cfg.num_blocks = 3;
  cfg.nodes_per_block = 60;
  cfg.p_in = 0.3;
  cfg.p_out = 0.02;
  cfg.feature_dim = 16;
  cfg.feature_shift = 3.0;
  cfg.seed = seed;
  cfg.train_per_block = 20;
  cfg.valid_per_block = 5;
  return erase::generate_sbm(cfg);
}

RunConfig quick_config(Objective obj, std::uint64_t seed) {
  RunConfig cfg;
  cfg.objective = obj;
  cfg.hidden_dim = 12;
  cfg.out_dim = 12;
  cfg.max_epochs = 50;
  cfg.patience = 0;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("training is bit-deterministic for a fixed seed") {
  const GraphBundle g = small_sbm(1);
  for (Objective obj :
       {Objective::erase, Objective::mcr2_plain, Objective::ce_baseline}) {
    const RunConfig cfg = quick_config(obj, 9);
    const TrainOutput a = erase::run_training(g, cfg);
    const TrainOutput b = erase::run_training(g, cfg);
    CHECK(a.objective_history == b.objective_history);
    CHECK(a.val_acc_history == b.val_acc_history);
    CHECK(a.best_epoch == b.best_epoch);
    CHECK((a.representations - b.representations).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.encoder.w1 - b.encoder.w1).cwiseAbs().maxCoeff() == 0.0);

    RunConfig other = cfg;
    other.seed = 10;
    const TrainOutput c = erase::run_training(g, other);
    CHECK((a.representations - c.representations).cwiseAbs().maxCoeff() > 0.0);
  }
}

TEST_CASE("outputs have the documented shapes") {
  const GraphBundle g = small_sbm(2);
  const TrainOutput out = erase::run_training(g, quick_config(Objective::erase, 0));
  CHECK(out.representations.rows() == g.num_nodes);
  CHECK(out.representations.cols() == 12);
  CHECK(out.semantic_labels.rows() == g.num_nodes);
  CHECK(out.semantic_labels.cols() == g.num_classes);
  CHECK_FALSE(out.head.has_value());
  CHECK(out.best_epoch >= 1);
  CHECK(out.best_epoch <= static_cast<int>(out.val_acc_history.size()));
  CHECK(out.objective_history.size() == out.val_acc_history.size());

  const TrainOutput ce = erase::run_training(g, quick_config(Objective::ce_baseline, 0));
  REQUIRE(ce.head.has_value());
  CHECK(ce.head->rows() == 12);
  CHECK(ce.head->cols() == g.num_classes);
}

TEST_CASE("the snapshot is the latest epoch attaining the best validation score") {
  const GraphBundle g = small_sbm(3);
  const TrainOutput out = erase::run_training(g, quick_config(Objective::erase, 1));
  const double best = *std::max_element(out.val_acc_history.begin(),
                                        out.val_acc_history.end());
  CHECK(out.val_acc_history[out.best_epoch - 1] == best);
  for (std::size_t e = out.best_epoch; e < out.val_acc_history.size(); ++e)
    CHECK(out.val_acc_history[e] < best);
}

TEST_CASE("patience stops training early") {
  const GraphBundle g = small_sbm(4);
  RunConfig cfg = quick_config(Objective::erase, 2);
  cfg.max_epochs = 400;
  cfg.patience = 5;
  const TrainOutput out = erase::run_training(g, cfg);
  CHECK(out.val_acc_history.size() < 400);
}

TEST_CASE("clean separable data trains to high accuracy") {
  const GraphBundle g = small_sbm(5, 3.0);
  RunConfig cfg = quick_config(Objective::erase, 3);
  cfg.max_epochs = 80;
  const TrainOutput out = erase::run_training(g, cfg);
  CHECK(out.val_acc_history[out.best_epoch - 1] >= 0.8);
  CHECK(erase::evaluate_test_accuracy(g, out) >= 0.9);

  RunConfig ce = quick_config(Objective::ce_baseline, 3);
  ce.max_epochs = 80;
  CHECK(erase::evaluate_test_accuracy(g, erase::run_training(g, ce)) >= 0.9);
}

TEST_CASE("moderate symmetric noise is absorbed on well-separated blocks") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const GraphBundle clean = separated_sbm(seed);
    GraphBundle noisy = clean;
    noisy.labels = erase::corrupt_labels(clean.labels, clean.num_classes,
                                         clean.mask(Split::train),
                                         {erase::NoiseKind::symmetric, 0.4, seed});
    RunConfig cfg;
    cfg.seed = seed;
    const TrainOutput out = erase::run_training(noisy, cfg);
    CHECK(erase::evaluate_test_accuracy(noisy, out) > 0.9);
  }
}

TEST_CASE("the objective rises on average over early epochs") {
  const GraphBundle g = small_sbm(6);
  RunConfig cfg = quick_config(Objective::erase, 4);
  cfg.max_epochs = 20;
  const TrainOutput out = erase::run_training(g, cfg);
  REQUIRE(out.objective_history.size() == 20);
  const double first =
      std::accumulate(out.objective_history.begin(),
                      out.objective_history.begin() + 10, 0.0) / 10.0;
  const double second =
      std::accumulate(out.objective_history.begin() + 10,
                      out.objective_history.end(), 0.0) / 10.0;
  CHECK(second > first);
}

TEST_CASE("semantic labels agree with the readout on test nodes") {
  const GraphBundle g = separated_sbm(7);
  RunConfig cfg;
  cfg.seed = 7;
  const TrainOutput out = erase::run_training(g, cfg);

  const std::vector<int> sem =
      erase::to_membership(out.semantic_labels, g.num_classes).assignment;
  const double sem_acc = erase::accuracy(sem, g.labels, g.mask(Split::test));
  const double probe_acc = erase::evaluate_test_accuracy(g, out);
  CHECK(std::abs(sem_acc - probe_acc) <= 0.05);
}

TEST_CASE("predictions cover every node and match the probe path") {
  const GraphBundle g = small_sbm(6);
  const TrainOutput out = erase::run_training(g, quick_config(Objective::erase, 4));
  const std::vector<int> pred = erase::evaluate_predictions(g, out);
  CHECK(pred.size() == static_cast<std::size_t>(g.num_nodes));
  int correct = 0, total = 0;
  for (int i = 0; i < g.num_nodes; ++i) {
    if (g.split[i] != Split::test) continue;
    ++total;
    correct += (pred[i] == g.labels[i]);
  }
  CHECK(static_cast<double>(correct) / total ==
        doctest::Approx(erase::evaluate_test_accuracy(g, out)));
}

TEST_CASE("zero max_epochs returns the initialized encoder and empty history") {
  const GraphBundle g = small_sbm(7);
  RunConfig cfg = quick_config(Objective::erase, 0);
  cfg.max_epochs = 0;
  const TrainOutput out = erase::run_training(g, cfg);
  CHECK(out.objective_history.empty());
  CHECK(out.val_acc_history.empty());
  CHECK(out.best_epoch == 0);
  CHECK(out.encoder.w1.rows() == g.num_features);
  CHECK(out.encoder.w1.cols() == 12);
  CHECK(out.encoder.w2.rows() == 12);
  CHECK(out.encoder.w1.allFinite());
  const TrainOutput again = erase::run_training(g, cfg);
  CHECK((out.encoder.w1 - again.encoder.w1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("degenerate bundles and configs are rejected") {
  GraphBundle g = small_sbm(7);
  RunConfig cfg = quick_config(Objective::erase, 0);

  RunConfig bad = cfg;
  bad.max_epochs = -1;
  CHECK_THROWS(erase::run_training(g, bad));

  GraphBundle no_train = g;
  for (auto& s : no_train.split)
    if (s == Split::train) s = Split::test;
  CHECK_THROWS(erase::run_training(no_train, cfg));

  GraphBundle no_valid = g;
  for (auto& s : no_valid.split)
    if (s == Split::valid) s = Split::test;
  CHECK_THROWS(erase::run_training(no_valid, cfg));
}
