#include <random>

#include "doctest.h"
#include "erase/graph.hpp"
#include "oracles.hpp"

using erase::GraphBundle;
using erase::SbmConfig;
using erase::SparseAdjacency;
using erase::Split;

TEST_CASE("csr matches dense for random edge lists") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + erase::uniform_int(rng, 9);
    const Eigen::MatrixXd dense = oracle::random_symmetric_adjacency(n, 0.4, rng);
    const SparseAdjacency adj =
        SparseAdjacency::from_edges(n, oracle::edges_of_dense(dense));

    CHECK(adj.to_dense().isApprox(dense, 1e-15));
    CHECK((adj.row_sums() - dense.rowwise().sum()).cwiseAbs().maxCoeff() == 0.0);

    const Eigen::MatrixXd x = oracle::random_matrix(n, 3, rng);
    CHECK(adj.multiply(x).isApprox(dense * x, 1e-12));
  }
}

TEST_CASE("from_triplets sums duplicates") {
  const SparseAdjacency adj = SparseAdjacency::from_triplets(
      3, {{{0, 1}, 1.0}, {{0, 1}, 2.5}, {{2, 2}, -1.0}, {{1, 0}, 4.0}});
  CHECK(adj.coeff(0, 1) == 3.5);
  CHECK(adj.coeff(1, 0) == 4.0);
  CHECK(adj.coeff(2, 2) == -1.0);
  CHECK(adj.coeff(0, 2) == 0.0);
  CHECK(adj.nnz() == 3);
}

TEST_CASE("from_triplets rejects out-of-range indices") {
  CHECK_THROWS(SparseAdjacency::from_triplets(2, {{{0, 2}, 1.0}}));
  CHECK_THROWS(SparseAdjacency::from_triplets(2, {{{-1, 0}, 1.0}}));
}

TEST_CASE("symmetric normalization matches the dense oracle") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + erase::uniform_int(rng, 9);
    const Eigen::MatrixXd dense = oracle::random_symmetric_adjacency(n, 0.3, rng);
    const SparseAdjacency adj =
        SparseAdjacency::from_edges(n, oracle::edges_of_dense(dense));
    for (bool loops : {false, true}) {
      const Eigen::MatrixXd got = erase::symmetric_normalize(adj, loops).to_dense();
      const Eigen::MatrixXd want = oracle::normalize_dense(dense, loops);
      CHECK((got - want).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
}

TEST_CASE("isolated nodes stay at zero without self loops") {
  const SparseAdjacency adj = SparseAdjacency::from_edges(3, {{0, 1}});
  const Eigen::MatrixXd norm = erase::symmetric_normalize(adj, false).to_dense();
  CHECK(norm.row(2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(norm.col(2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(norm(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("masked adjacency keeps only edges inside the mask") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + erase::uniform_int(rng, 9);
    const Eigen::MatrixXd dense = oracle::random_symmetric_adjacency(n, 0.5, rng);
    std::vector<bool> mask(n);
    for (int i = 0; i < n; ++i) mask[i] = erase::canonical(rng) < 0.5;
    const SparseAdjacency adj =
        SparseAdjacency::from_edges(n, oracle::edges_of_dense(dense));
    const Eigen::MatrixXd got = erase::masked_adjacency(adj, mask).to_dense();
    CHECK(got.isApprox(oracle::mask_dense(dense, mask), 1e-15));
  }
}

TEST_CASE("bundle validation rejects malformed inputs") {
  GraphBundle g;
  g.num_nodes = 3;
  g.num_features = 2;
  g.num_classes = 2;
  g.features = Eigen::MatrixXd::Zero(3, 2);
  g.labels = {0, 1, 0};
  g.split = {Split::train, Split::valid, Split::test};
  g.edges = {{0, 1}, {1, 2}};
  CHECK_NOTHROW(g.validate());

  GraphBundle bad = g;
  bad.labels[1] = 2;
  CHECK_THROWS(bad.validate());

  bad = g;
  bad.edges = {{1, 1}};
  CHECK_THROWS(bad.validate());

  bad = g;
  bad.edges = {{1, 2}, {0, 1}};
  CHECK_THROWS(bad.validate());

  bad = g;
  bad.edges = {{0, 1}, {0, 1}};
  CHECK_THROWS(bad.validate());

  bad = g;
  bad.features = Eigen::MatrixXd::Zero(2, 2);
  CHECK_THROWS(bad.validate());
}

TEST_CASE("masks count split members") {
  GraphBundle g;
  g.split = {Split::train, Split::test, Split::train, Split::valid};
  const std::vector<bool> m = g.mask(Split::train);
  CHECK(m == std::vector<bool>{true, false, true, false});
  CHECK(g.count(Split::train) == 2);
  CHECK(g.count(Split::valid) == 1);
  CHECK(g.count(Split::test) == 1);
}

TEST_CASE("sbm generator is deterministic and honors quotas") {
  SbmConfig cfg;
  cfg.num_blocks = 3;
  cfg.nodes_per_block = 30;
  cfg.feature_dim = 8;
  cfg.feature_shift = 1.5;
  cfg.seed = 9;
  cfg.train_per_block = 5;
  cfg.valid_per_block = 4;

  const GraphBundle a = erase::generate_sbm(cfg);
  const GraphBundle b = erase::generate_sbm(cfg);
  CHECK((a.features - b.features).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.edges == b.edges);
  CHECK(a.labels == b.labels);

  CHECK(a.num_nodes == 90);
  CHECK(a.num_classes == 3);
  CHECK(a.count(Split::train) == 15);
  CHECK(a.count(Split::valid) == 12);
  CHECK(a.count(Split::test) == 63);
  for (int i = 0; i < a.num_nodes; ++i) CHECK(a.labels[i] == i / 30);

  cfg.seed = 10;
  const GraphBundle c = erase::generate_sbm(cfg);
  CHECK((a.features - c.features).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("sbm rejects quotas that consume a whole block") {
  SbmConfig cfg;
  cfg.nodes_per_block = 10;
  cfg.train_per_block = 6;
  cfg.valid_per_block = 4;
  CHECK_THROWS(erase::generate_sbm(cfg));
}

TEST_CASE("sbm feature shift moves block means") {
  SbmConfig cfg;
  cfg.num_blocks = 2;
  cfg.nodes_per_block = 500;
  cfg.feature_dim = 4;
  cfg.feature_shift = 3.0;
  cfg.seed = 1;
  const GraphBundle g = erase::generate_sbm(cfg);
  const double mean0 = g.features.block(0, 0, 500, 1).mean();
  const double mean1 = g.features.block(500, 1, 500, 1).mean();
  CHECK(mean0 == doctest::Approx(3.0).epsilon(0.1));
  CHECK(mean1 == doctest::Approx(3.0).epsilon(0.1));
  CHECK(g.features.block(500, 0, 500, 1).mean() == doctest::Approx(0.0).epsilon(1.0));
}
