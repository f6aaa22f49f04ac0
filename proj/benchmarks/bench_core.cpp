// Microbenchmarks for the numeric hot paths: sparse products, the two
// propagation stages, the rate objective and its gradient, encoder passes,
// and one full training epoch. Sizes follow the synthetic experiments.

#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <algorithm>
#include <random>

#include "erase/encoder.hpp"
#include "erase/graph.hpp"
#include "erase/noise.hpp"
#include "erase/propagation.hpp"
#include "erase/random.hpp"
#include "erase/rate.hpp"
#include "erase/trainer.hpp"

namespace {

erase::GraphBundle make_bundle(int nodes_per_block) {
  erase::SbmConfig cfg;
  cfg.num_blocks = 3;
  cfg.nodes_per_block = nodes_per_block;
  cfg.p_in = 0.1;
  cfg.p_out = 0.01;
  cfg.feature_dim = 32;
  cfg.feature_shift = 0.4;
  cfg.seed = 6;
  cfg.train_per_block = std::max(1, nodes_per_block / 10);
  cfg.valid_per_block = std::max(1, nodes_per_block / 20);
  return erase::generate_sbm(cfg);
}

Eigen::MatrixXd gaussian_matrix(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = erase::gaussian(rng);
  return m;
}

erase::Membership random_membership(int n, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  erase::Membership m;
  m.assignment.resize(n);
  m.counts.assign(k, 0);
  for (int& a : m.assignment) ++m.counts[a = erase::uniform_int(rng, k)];
  return m;
}

void bm_generate_bundle(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(make_bundle(static_cast<int>(state.range(0))));
  }
}
BENCHMARK(bm_generate_bundle)->Arg(100)->Arg(400);

void bm_sparse_multiply(benchmark::State& state) {
  const erase::GraphBundle g = make_bundle(static_cast<int>(state.range(0)));
  const erase::SparseAdjacency adj =
      erase::SparseAdjacency::from_edges(g.num_nodes, g.edges);
  const Eigen::MatrixXd x = gaussian_matrix(g.num_nodes, 64, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(adj.multiply(x));
  }
}
BENCHMARK(bm_sparse_multiply)->Arg(100)->Arg(400);

void bm_symmetric_normalize(benchmark::State& state) {
  const erase::GraphBundle g = make_bundle(static_cast<int>(state.range(0)));
  const erase::SparseAdjacency adj =
      erase::SparseAdjacency::from_edges(g.num_nodes, g.edges);
  for (auto _ : state) {
    benchmark::DoNotOptimize(erase::symmetric_normalize(adj, true));
  }
}
BENCHMARK(bm_symmetric_normalize)->Arg(100)->Arg(400);

void bm_denoise_propagation(benchmark::State& state) {
  const erase::GraphBundle g = make_bundle(static_cast<int>(state.range(0)));
  const erase::SparseAdjacency adj =
      erase::SparseAdjacency::from_edges(g.num_nodes, g.edges);
  const std::vector<bool> mask = g.mask(erase::Split::train);
  const Eigen::MatrixXd l0 = erase::init_label_matrix(g.labels, g.num_classes, mask);
  for (auto _ : state) {
    benchmark::DoNotOptimize(erase::denoise_labels(adj, mask, l0, 0.6, 5));
  }
}
BENCHMARK(bm_denoise_propagation)->Arg(100)->Arg(400);

void bm_semantic_propagation(benchmark::State& state) {
  const erase::GraphBundle g = make_bundle(static_cast<int>(state.range(0)));
  const erase::SparseAdjacency adj =
      erase::SparseAdjacency::from_edges(g.num_nodes, g.edges);
  const Eigen::MatrixXd labels =
      erase::init_label_matrix(g.labels, g.num_classes, std::vector<bool>(g.num_nodes, true));
  for (auto _ : state) {
    benchmark::DoNotOptimize(erase::semantic_propagate(adj, labels, 0.6, 5));
  }
}
BENCHMARK(bm_semantic_propagation)->Arg(100)->Arg(400);

void bm_objective(benchmark::State& state) {
  const int n = 300;
  const int d = static_cast<int>(state.range(0));
  const Eigen::MatrixXd z = gaussian_matrix(n, d, 2);
  const erase::Membership mem = random_membership(n, 3, 3);
  const erase::RateConfig cfg{0.05, 1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(erase::delta_r(z, mem, cfg));
  }
}
BENCHMARK(bm_objective)->Arg(16)->Arg(64);

void bm_objective_gradient(benchmark::State& state) {
  const int n = 300;
  const int d = static_cast<int>(state.range(0));
  const Eigen::MatrixXd z = gaussian_matrix(n, d, 2);
  const erase::Membership mem = random_membership(n, 3, 3);
  const erase::RateConfig cfg{0.05, 1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(erase::delta_r_gradient(z, mem, cfg));
  }
}
BENCHMARK(bm_objective_gradient)->Arg(16)->Arg(64);

void bm_encoder_forward(benchmark::State& state) {
  const erase::GraphBundle g = make_bundle(static_cast<int>(state.range(0)));
  const erase::SparseAdjacency adj = erase::symmetric_normalize(
      erase::SparseAdjacency::from_edges(g.num_nodes, g.edges), true);
  const erase::EncoderState enc = erase::init_encoder(g.num_features, 64, 16, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(erase::encoder_forward(adj, g.features, enc));
  }
}
BENCHMARK(bm_encoder_forward)->Arg(100)->Arg(400);

void bm_encoder_backward(benchmark::State& state) {
  const erase::GraphBundle g = make_bundle(static_cast<int>(state.range(0)));
  const erase::SparseAdjacency adj = erase::symmetric_normalize(
      erase::SparseAdjacency::from_edges(g.num_nodes, g.edges), true);
  const erase::EncoderState enc = erase::init_encoder(g.num_features, 64, 16, 0);
  const erase::ForwardCache cache = erase::encoder_forward(adj, g.features, enc);
  const Eigen::MatrixXd z_grad = gaussian_matrix(g.num_nodes, 16, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(erase::encoder_backward(adj, g.features, cache, enc, z_grad));
  }
}
BENCHMARK(bm_encoder_backward)->Arg(100)->Arg(400);

void bm_corrupt_labels(benchmark::State& state) {
  const erase::GraphBundle g = make_bundle(400);
  const std::vector<bool> mask = g.mask(erase::Split::train);
  const erase::NoiseSpec spec{erase::NoiseKind::asymmetric, 0.4, 9};
  for (auto _ : state) {
    benchmark::DoNotOptimize(erase::corrupt_labels(g.labels, g.num_classes, mask, spec));
  }
}
BENCHMARK(bm_corrupt_labels);

void bm_training_epoch(benchmark::State& state) {
  const erase::GraphBundle g = make_bundle(100);
  erase::RunConfig cfg;
  cfg.out_dim = 16;
  cfg.max_epochs = 1;
  cfg.patience = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(erase::run_training(g, cfg));
  }
}
BENCHMARK(bm_training_epoch);

void bm_readout(benchmark::State& state) {
  const erase::GraphBundle g = make_bundle(100);
  erase::RunConfig cfg;
  cfg.out_dim = 16;
  cfg.max_epochs = 5;
  cfg.patience = 0;
  const erase::TrainOutput out = erase::run_training(g, cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(erase::evaluate_test_accuracy(g, out));
  }
}
BENCHMARK(bm_readout);

}  // namespace

BENCHMARK_MAIN();
