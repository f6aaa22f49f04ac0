#include "erase/encoder.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include "erase/random.hpp"

namespace erase {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'E', 'R', 'A', 'S', 'E', 'C', 'K', 'P'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kFlagHasHead = 1u << 0;

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

void require_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite())
    throw std::runtime_error(std::string("encoder: non-finite values in ") + what);
}

Eigen::MatrixXd glorot(int rows, int cols, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / (rows + cols));
  Eigen::MatrixXd w(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) w(i, j) = uniform(rng, -bound, bound);
  return w;
}

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error(path + ": truncated checkpoint");
  return v;
}

void write_matrix(std::ofstream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) write_pod(out, m(i, j));
}

Eigen::MatrixXd read_matrix(std::ifstream& in, const std::string& path,
                            Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = read_pod<double>(in, path);
  return m;
}

}  // namespace

AdamMoments zero_moments(Eigen::Index rows, Eigen::Index cols) {
  return {Eigen::MatrixXd::Zero(rows, cols), Eigen::MatrixXd::Zero(rows, cols)};
}

void adam_update(Eigen::MatrixXd& param, AdamMoments& mom, const Eigen::MatrixXd& grad,
                 double lr, double weight_decay, long step) {
  if (step < 1) throw std::runtime_error("encoder: adam step must be 1-based");
  require_finite(grad, "gradient");
  const Eigen::MatrixXd g = grad + weight_decay * param;
  mom.m = kBeta1 * mom.m + (1.0 - kBeta1) * g;
  mom.v = kBeta2 * mom.v + (1.0 - kBeta2) * g.cwiseProduct(g);
  const double corr1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
  const double corr2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
  const Eigen::ArrayXXd m_hat = mom.m.array() / corr1;
  const Eigen::ArrayXXd v_hat = mom.v.array() / corr2;
  param.array() -= lr * m_hat / (v_hat.sqrt() + kAdamEps);
}

EncoderState init_encoder(int in_dim, int hidden_dim, int out_dim, std::uint64_t seed) {
  if (in_dim <= 0 || hidden_dim <= 0 || out_dim <= 0)
    throw std::runtime_error("encoder: dimensions must be positive");
  std::mt19937_64 rng(seed);
  EncoderState enc;
  enc.w1 = glorot(in_dim, hidden_dim, rng);
  enc.w2 = glorot(hidden_dim, out_dim, rng);
  enc.m1 = zero_moments(in_dim, hidden_dim);
  enc.m2 = zero_moments(hidden_dim, out_dim);
  enc.step = 0;
  return enc;
}

ForwardCache encoder_forward(const SparseAdjacency& adj_norm, const Eigen::MatrixXd& x,
                             const EncoderState& enc) {
  if (x.cols() != enc.w1.rows())
    throw std::runtime_error("encoder: feature dimension mismatch");
  ForwardCache cache;
  cache.h1_pre = adj_norm.multiply(x) * enc.w1;
  cache.h1 = cache.h1_pre.cwiseMax(0.0);
  cache.z = adj_norm.multiply(cache.h1) * enc.w2;
  return cache;
}

EncoderGradients encoder_backward(const SparseAdjacency& adj_norm,
                                  const Eigen::MatrixXd& x, const ForwardCache& cache,
                                  const EncoderState& enc,
                                  const Eigen::MatrixXd& z_grad) {
  require_finite(z_grad, "output gradient");
  EncoderGradients g;
  const Eigen::MatrixXd ah1 = adj_norm.multiply(cache.h1);
  g.w2 = ah1.transpose() * z_grad;
  Eigen::MatrixXd dh1 = adj_norm.multiply(z_grad * enc.w2.transpose());
  dh1 = dh1.cwiseProduct(
      (cache.h1_pre.array() > 0.0).cast<double>().matrix());
  g.w1 = adj_norm.multiply(x).transpose() * dh1;
  return g;
}

void adam_step(EncoderState& enc, const EncoderGradients& grads, double lr,
               double weight_decay) {
  ++enc.step;
  adam_update(enc.w1, enc.m1, grads.w1, lr, weight_decay, enc.step);
  adam_update(enc.w2, enc.m2, grads.w2, lr, weight_decay, enc.step);
}

void save_checkpoint(const std::string& path, const EncoderState& enc,
                     const Eigen::MatrixXd* head) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out.write(kMagic, sizeof(kMagic));
  write_pod(out, kVersion);
  write_pod(out, head ? kFlagHasHead : 0u);
  write_pod(out, static_cast<std::int32_t>(enc.w1.rows()));
  write_pod(out, static_cast<std::int32_t>(enc.w1.cols()));
  write_pod(out, static_cast<std::int32_t>(enc.w2.cols()));
  write_pod(out, static_cast<std::int64_t>(enc.step));
  write_matrix(out, enc.w1);
  write_matrix(out, enc.w2);
  if (head) {
    if (head->rows() != enc.w2.cols())
      throw std::runtime_error("encoder: head input dimension mismatch");
    write_pod(out, static_cast<std::int32_t>(head->cols()));
    write_matrix(out, *head);
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error(path + ": not a checkpoint file");
  const auto version = read_pod<std::uint32_t>(in, path);
  if (version != kVersion)
    throw std::runtime_error(path + ": unsupported checkpoint version");
  const auto flags = read_pod<std::uint32_t>(in, path);
  const auto in_dim = read_pod<std::int32_t>(in, path);
  const auto hidden_dim = read_pod<std::int32_t>(in, path);
  const auto out_dim = read_pod<std::int32_t>(in, path);
  const auto step = read_pod<std::int64_t>(in, path);
  if (in_dim <= 0 || hidden_dim <= 0 || out_dim <= 0)
    throw std::runtime_error(path + ": corrupt checkpoint dimensions");

  Checkpoint ckp;
  ckp.encoder.w1 = read_matrix(in, path, in_dim, hidden_dim);
  ckp.encoder.w2 = read_matrix(in, path, hidden_dim, out_dim);
  ckp.encoder.m1 = zero_moments(in_dim, hidden_dim);
  ckp.encoder.m2 = zero_moments(hidden_dim, out_dim);
  ckp.encoder.step = step;
  if (flags & kFlagHasHead) {
    const auto classes = read_pod<std::int32_t>(in, path);
    if (classes <= 0) throw std::runtime_error(path + ": corrupt head dimensions");
    ckp.head = read_matrix(in, path, out_dim, classes);
  }
  return ckp;
}

}  // namespace erase
