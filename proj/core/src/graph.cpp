#include "erase/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "erase/random.hpp"

namespace erase {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

}  // namespace

void GraphBundle::validate() const {
  if (num_nodes <= 0) fail("bundle: num_nodes must be positive");
  if (num_features <= 0) fail("bundle: num_features must be positive");
  if (num_classes <= 0) fail("bundle: num_classes must be positive");
  if (features.rows() != num_nodes || features.cols() != num_features)
    fail("bundle: feature matrix shape mismatch");
  if (static_cast<int>(labels.size()) != num_nodes)
    fail("bundle: labels size mismatch");
  if (static_cast<int>(split.size()) != num_nodes)
    fail("bundle: split size mismatch");
  for (int i = 0; i < num_nodes; ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) {
      std::ostringstream os;
      os << "bundle: label " << labels[i] << " at node " << i << " out of range";
      fail(os.str());
    }
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [s, d] = edges[e];
    if (s < 0 || s >= num_nodes || d < 0 || d >= num_nodes)
      fail("bundle: edge endpoint out of range");
    if (s >= d) fail("bundle: edges must satisfy src < dst");
    if (e > 0 && !(edges[e - 1] < edges[e]))
      fail("bundle: edges must be sorted and unique");
  }
}

std::vector<bool> GraphBundle::mask(Split which) const {
  std::vector<bool> m(split.size(), false);
  for (std::size_t i = 0; i < split.size(); ++i) m[i] = (split[i] == which);
  return m;
}

int GraphBundle::count(Split which) const {
  int c = 0;
  for (Split s : split) c += (s == which);
  return c;
}

SparseAdjacency SparseAdjacency::from_edges(
    int num_nodes, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::pair<std::pair<int, int>, double>> trips;
  trips.reserve(edges.size() * 2);
  for (const auto& [s, d] : edges) {
    trips.push_back({{s, d}, 1.0});
    trips.push_back({{d, s}, 1.0});
  }
  return from_triplets(num_nodes, std::move(trips));
}

SparseAdjacency SparseAdjacency::from_triplets(
    int num_nodes, std::vector<std::pair<std::pair<int, int>, double>> triplets) {
  std::sort(triplets.begin(), triplets.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  SparseAdjacency out;
  out.n = num_nodes;
  out.row_ptr.assign(static_cast<std::size_t>(num_nodes) + 1, 0);

  std::size_t w = 0;
  for (std::size_t r = 0; r < triplets.size();) {
    const auto key = triplets[r].first;
    if (key.first < 0 || key.first >= num_nodes || key.second < 0 ||
        key.second >= num_nodes)
      fail("adjacency: triplet index out of range");
    double sum = 0.0;
    while (r < triplets.size() && triplets[r].first == key) {
      sum += triplets[r].second;
      ++r;
    }
    triplets[w++] = {key, sum};
  }
  triplets.resize(w);

  out.col.resize(w);
  out.val.resize(w);
  for (std::size_t k = 0; k < w; ++k) {
    out.row_ptr[triplets[k].first.first + 1]++;
    out.col[k] = triplets[k].first.second;
    out.val[k] = triplets[k].second;
  }
  for (int i = 0; i < num_nodes; ++i) out.row_ptr[i + 1] += out.row_ptr[i];
  return out;
}

Eigen::MatrixXd SparseAdjacency::multiply(const Eigen::MatrixXd& x) const {
  if (x.rows() != n) fail("adjacency: multiply dimension mismatch");
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, x.cols());
  for (int i = 0; i < n; ++i)
    for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      y.row(i) += val[k] * x.row(col[k]);
  return y;
}

Eigen::VectorXd SparseAdjacency::row_sums() const {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i)
    for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s[i] += val[k];
  return s;
}

Eigen::MatrixXd SparseAdjacency::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      d(i, col[k]) += val[k];
  return d;
}

double SparseAdjacency::coeff(int i, int j) const {
  for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
    if (col[k] == j) return val[k];
  return 0.0;
}

SparseAdjacency symmetric_normalize(const SparseAdjacency& adj, bool add_self_loops) {
  std::vector<std::pair<std::pair<int, int>, double>> trips;
  trips.reserve(adj.col.size() + (add_self_loops ? adj.n : 0));
  for (int i = 0; i < adj.n; ++i)
    for (std::int64_t k = adj.row_ptr[i]; k < adj.row_ptr[i + 1]; ++k)
      trips.push_back({{i, adj.col[k]}, adj.val[k]});
  if (add_self_loops)
    for (int i = 0; i < adj.n; ++i) trips.push_back({{i, i}, 1.0});

  SparseAdjacency merged = SparseAdjacency::from_triplets(adj.n, std::move(trips));
  const Eigen::VectorXd deg = merged.row_sums();
  Eigen::VectorXd inv_sqrt(adj.n);
  for (int i = 0; i < adj.n; ++i)
    inv_sqrt[i] = deg[i] > 0.0 ? 1.0 / std::sqrt(deg[i]) : 0.0;
  for (int i = 0; i < merged.n; ++i)
    for (std::int64_t k = merged.row_ptr[i]; k < merged.row_ptr[i + 1]; ++k)
      merged.val[k] *= inv_sqrt[i] * inv_sqrt[merged.col[k]];
  return merged;
}

SparseAdjacency masked_adjacency(const SparseAdjacency& adj, const std::vector<bool>& mask) {
  if (static_cast<int>(mask.size()) != adj.n)
    fail("adjacency: mask size mismatch");
  std::vector<std::pair<std::pair<int, int>, double>> trips;
  for (int i = 0; i < adj.n; ++i) {
    if (!mask[i]) continue;
    for (std::int64_t k = adj.row_ptr[i]; k < adj.row_ptr[i + 1]; ++k)
      if (mask[adj.col[k]]) trips.push_back({{i, adj.col[k]}, adj.val[k]});
  }
  return SparseAdjacency::from_triplets(adj.n, std::move(trips));
}

GraphBundle generate_sbm(const SbmConfig& cfg) {
  if (cfg.num_blocks <= 0 || cfg.nodes_per_block <= 0)
    fail("sbm: block counts must be positive");
  if (cfg.feature_dim <= 0) fail("sbm: feature_dim must be positive");
  if (cfg.train_per_block + cfg.valid_per_block >= cfg.nodes_per_block)
    fail("sbm: train + valid quota must leave test nodes in each block");

  const int n = cfg.num_blocks * cfg.nodes_per_block;
  std::mt19937_64 rng(cfg.seed);

  GraphBundle g;
  g.num_nodes = n;
  g.num_features = cfg.feature_dim;
  g.num_classes = cfg.num_blocks;
  g.features.resize(n, cfg.feature_dim);
  g.labels.resize(n);
  g.split.resize(n);

  for (int i = 0; i < n; ++i) {
    const int block = i / cfg.nodes_per_block;
    const int rank = i % cfg.nodes_per_block;
    g.labels[i] = block;
    g.split[i] = rank < cfg.train_per_block ? Split::train
                 : rank < cfg.train_per_block + cfg.valid_per_block ? Split::valid
                                                                    : Split::test;
    for (int f = 0; f < cfg.feature_dim; ++f) g.features(i, f) = gaussian(rng);
    g.features(i, block % cfg.feature_dim) += cfg.feature_shift;
  }

  for (int i = 0; i < n; ++i) {
    const int bi = i / cfg.nodes_per_block;
    for (int j = i + 1; j < n; ++j) {
      const int bj = j / cfg.nodes_per_block;
      const double p = bi == bj ? cfg.p_in : cfg.p_out;
      if (canonical(rng) < p) g.edges.push_back({i, j});
    }
  }

  g.validate();
  return g;
}

}  // namespace erase
