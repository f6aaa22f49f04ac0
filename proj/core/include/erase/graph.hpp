#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

namespace erase {

enum class Split { train, valid, test };

// Undirected graph with dense node features and integer labels.
// Edges are stored once with src < dst; no self-loops, no duplicates.
struct GraphBundle {
  int num_nodes = 0;
  int num_features = 0;
  int num_classes = 0;
  Eigen::MatrixXd features;                       // num_nodes x num_features
  std::vector<std::pair<int, int>> edges;         // canonical: src < dst, sorted
  std::vector<int> labels;                        // in [0, num_classes)
  std::vector<Split> split;

  // Throws std::runtime_error on any structural violation.
  void validate() const;

  // Indicator over nodes in the given split.
  std::vector<bool> mask(Split which) const;
  int count(Split which) const;
};

// CSR matrix over the node set. Symmetric structure is the caller's
// responsibility; from_edges always inserts both directions.
struct SparseAdjacency {
  int n = 0;
  std::vector<std::int64_t> row_ptr;  // size n + 1
  std::vector<int> col;
  std::vector<double> val;

  std::int64_t nnz() const { return static_cast<std::int64_t>(col.size()); }

  // Builds the symmetric 0/1 adjacency of an undirected edge list.
  static SparseAdjacency from_edges(int num_nodes,
                                    const std::vector<std::pair<int, int>>& edges);

  // Builds from triplets; duplicate entries are summed.
  static SparseAdjacency from_triplets(
      int num_nodes, std::vector<std::pair<std::pair<int, int>, double>> triplets);

  Eigen::MatrixXd multiply(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd row_sums() const;
  Eigen::MatrixXd to_dense() const;
  double coeff(int i, int j) const;
};

// D^{-1/2} (A [+ I]) D^{-1/2}. Zero-degree rows stay zero.
SparseAdjacency symmetric_normalize(const SparseAdjacency& adj, bool add_self_loops);

// Keeps entries whose endpoints are both masked; everything else drops to
// structural zero (entire rows removed, not stored as explicit zeros).
SparseAdjacency masked_adjacency(const SparseAdjacency& adj, const std::vector<bool>& mask);

// Planted-partition generator used by tests and the synthetic CLI path.
// Block k draws features from N(shift * e_{k mod dim}, I); the first
// train_per_block nodes of each block are train, the next valid_per_block
// are valid, the rest test.
struct SbmConfig {
  int num_blocks = 3;
  int nodes_per_block = 100;
  double p_in = 0.1;
  double p_out = 0.01;
  int feature_dim = 32;
  double feature_shift = 1.0;
  std::uint64_t seed = 0;
  int train_per_block = 10;
  int valid_per_block = 10;
};

GraphBundle generate_sbm(const SbmConfig& cfg);

}  // namespace erase
