#include "erase/trainer.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "erase/propagation.hpp"
#include "erase/random.hpp"
#include "erase/rate.hpp"
#include "erase/semantics.hpp"

namespace erase {

namespace {

struct EarlyStop {
  double best_val = -1.0;
  int best_epoch = 0;
  int stale = 0;

  // Ties move the snapshot to the later epoch so the kept geometry is the
  // most trained one; only strict improvements reset the patience budget.
  enum class Verdict { improved, tied, worse };
  Verdict observe(double val_acc, int epoch) {
    if (val_acc > best_val) {
      best_val = val_acc;
      best_epoch = epoch;
      stale = 0;
      return Verdict::improved;
    }
    ++stale;
    if (val_acc == best_val) {
      best_epoch = epoch;
      return Verdict::tied;
    }
    return Verdict::worse;
  }
  bool exhausted(int patience) const { return patience > 0 && stale >= patience; }
};

std::vector<int> train_label_list(const GraphBundle& g, std::vector<int>* rows) {
  std::vector<int> ys;
  for (int i = 0; i < g.num_nodes; ++i) {
    if (g.split[i] != Split::train) continue;
    ys.push_back(g.labels[i]);
    if (rows) rows->push_back(i);
  }
  return ys;
}

Eigen::MatrixXd glorot_matrix(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double bound = std::sqrt(6.0 / (rows + cols));
  Eigen::MatrixXd w(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) w(i, j) = uniform(rng, -bound, bound);
  return w;
}

TrainOutput train_erase(const GraphBundle& g, const RunConfig& cfg) {
  const SparseAdjacency adj = SparseAdjacency::from_edges(g.num_nodes, g.edges);
  const SparseAdjacency adj_enc = symmetric_normalize(adj, /*add_self_loops=*/true);
  const SparseAdjacency adj_prop = symmetric_normalize(adj, /*add_self_loops=*/false);
  const std::vector<bool> train_mask = g.mask(Split::train);
  const std::vector<bool> valid_mask = g.mask(Split::valid);
  const RateConfig rate_cfg{cfg.epsilon_sq, cfg.gamma};

  // Stage one runs once; the denoised labels and their argmax stay frozen
  // for the rest of training.
  const Eigen::MatrixXd l0 = init_label_matrix(g.labels, g.num_classes, train_mask);
  const Eigen::MatrixXd l_denoised =
      denoise_labels(adj, train_mask, l0, cfg.alpha1, cfg.t1);
  const std::vector<int> denoised_assignment =
      to_membership(l_denoised, g.num_classes).assignment;

  EncoderState enc =
      init_encoder(g.num_features, cfg.hidden_dim, cfg.out_dim, cfg.seed);

  TrainOutput out;
  out.encoder = enc;
  EarlyStop stop;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const ForwardCache cache = encoder_forward(adj_enc, g.features, enc);

    const PrototypeSet protos =
        estimate_prototypes(cache.z, denoised_assignment, train_mask, g.num_classes);
    const Eigen::MatrixXd l_proto = prototype_pseudo_labels(cache.z, protos);
    const Eigen::MatrixXd l_mixed = semantic_mix(l_proto, l_denoised, cfg.beta);
    const Eigen::MatrixXd l_sem = propagate(adj_prop, l_mixed, cfg.alpha2, cfg.t2);
    const Membership membership = to_membership(l_sem, g.num_classes);

    out.objective_history.push_back(delta_r(cache.z, membership, rate_cfg));
    const double val_acc =
        accuracy(nearest_prototype(cache.z, protos), g.labels, valid_mask);
    out.val_acc_history.push_back(val_acc);

    if (stop.observe(val_acc, epoch) != EarlyStop::Verdict::worse) {
      out.encoder = enc;
      out.representations = cache.z;
      out.semantic_labels = l_sem;
      out.best_epoch = epoch;
    }
    if (stop.exhausted(cfg.patience)) break;

    const Eigen::MatrixXd loss_grad =
        -delta_r_gradient(cache.z, membership, rate_cfg);
    const EncoderGradients grads =
        encoder_backward(adj_enc, g.features, cache, enc, loss_grad);
    adam_step(enc, grads, cfg.lr, cfg.weight_decay);
  }
  return out;
}

TrainOutput train_mcr2_plain(const GraphBundle& g, const RunConfig& cfg) {
  const SparseAdjacency adj = SparseAdjacency::from_edges(g.num_nodes, g.edges);
  const SparseAdjacency adj_enc = symmetric_normalize(adj, /*add_self_loops=*/true);
  const std::vector<bool> train_mask = g.mask(Split::train);
  const std::vector<bool> valid_mask = g.mask(Split::valid);
  const RateConfig rate_cfg{cfg.epsilon_sq, cfg.gamma};

  std::vector<int> train_rows;
  const std::vector<int> train_labels = train_label_list(g, &train_rows);
  Membership membership;
  membership.assignment = train_labels;
  membership.counts.assign(g.num_classes, 0);
  for (int y : train_labels) membership.counts[y]++;

  EncoderState enc =
      init_encoder(g.num_features, cfg.hidden_dim, cfg.out_dim, cfg.seed);

  TrainOutput out;
  out.encoder = enc;
  out.semantic_labels = init_label_matrix(g.labels, g.num_classes, train_mask);
  EarlyStop stop;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const ForwardCache cache = encoder_forward(adj_enc, g.features, enc);

    Eigen::MatrixXd z_train(train_rows.size(), cfg.out_dim);
    for (std::size_t r = 0; r < train_rows.size(); ++r)
      z_train.row(r) = cache.z.row(train_rows[r]);

    out.objective_history.push_back(delta_r(z_train, membership, rate_cfg));
    const PrototypeSet protos =
        estimate_prototypes(cache.z, g.labels, train_mask, g.num_classes);
    const double val_acc =
        accuracy(nearest_prototype(cache.z, protos), g.labels, valid_mask);
    out.val_acc_history.push_back(val_acc);

    if (stop.observe(val_acc, epoch) != EarlyStop::Verdict::worse) {
      out.encoder = enc;
      out.representations = cache.z;
      out.best_epoch = epoch;
    }
    if (stop.exhausted(cfg.patience)) break;

    const Eigen::MatrixXd g_train = delta_r_gradient(z_train, membership, rate_cfg);
    Eigen::MatrixXd loss_grad = Eigen::MatrixXd::Zero(g.num_nodes, cfg.out_dim);
    for (std::size_t r = 0; r < train_rows.size(); ++r)
      loss_grad.row(train_rows[r]) = -g_train.row(r);
    const EncoderGradients grads =
        encoder_backward(adj_enc, g.features, cache, enc, loss_grad);
    adam_step(enc, grads, cfg.lr, cfg.weight_decay);
  }
  return out;
}

TrainOutput train_ce_baseline(const GraphBundle& g, const RunConfig& cfg) {
  const SparseAdjacency adj = SparseAdjacency::from_edges(g.num_nodes, g.edges);
  const SparseAdjacency adj_enc = symmetric_normalize(adj, /*add_self_loops=*/true);
  const std::vector<bool> train_mask = g.mask(Split::train);
  const std::vector<bool> valid_mask = g.mask(Split::valid);

  std::vector<int> train_rows;
  const std::vector<int> train_labels = train_label_list(g, &train_rows);
  const double n_train = static_cast<double>(train_rows.size());

  EncoderState enc =
      init_encoder(g.num_features, cfg.hidden_dim, cfg.out_dim, cfg.seed);
  Eigen::MatrixXd head =
      glorot_matrix(cfg.out_dim, g.num_classes, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  AdamMoments head_mom = zero_moments(cfg.out_dim, g.num_classes);

  TrainOutput out;
  out.encoder = enc;
  out.head = head;
  out.semantic_labels = init_label_matrix(g.labels, g.num_classes, train_mask);
  EarlyStop stop;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const ForwardCache cache = encoder_forward(adj_enc, g.features, enc);
    const Eigen::MatrixXd probs = softmax_rows(cache.z * head);

    double ce = 0.0;
    Eigen::MatrixXd dlogits = Eigen::MatrixXd::Zero(g.num_nodes, g.num_classes);
    for (std::size_t r = 0; r < train_rows.size(); ++r) {
      const int i = train_rows[r];
      const int y = train_labels[r];
      ce -= std::log(std::max(probs(i, y), 1e-300));
      dlogits.row(i) = probs.row(i) / n_train;
      dlogits(i, y) -= 1.0 / n_train;
    }
    out.objective_history.push_back(-(ce / n_train));
    const double val_acc = accuracy(predict(cache.z, head), g.labels, valid_mask);
    out.val_acc_history.push_back(val_acc);

    if (stop.observe(val_acc, epoch) != EarlyStop::Verdict::worse) {
      out.encoder = enc;
      out.head = head;
      out.representations = cache.z;
      out.best_epoch = epoch;
    }
    if (stop.exhausted(cfg.patience)) break;

    const Eigen::MatrixXd head_grad = cache.z.transpose() * dlogits;
    const Eigen::MatrixXd z_grad = dlogits * head.transpose();
    const EncoderGradients grads =
        encoder_backward(adj_enc, g.features, cache, enc, z_grad);
    ++enc.step;
    adam_update(enc.w1, enc.m1, grads.w1, cfg.lr, cfg.weight_decay, enc.step);
    adam_update(enc.w2, enc.m2, grads.w2, cfg.lr, cfg.weight_decay, enc.step);
    adam_update(head, head_mom, head_grad, cfg.lr, cfg.weight_decay, enc.step);
  }
  return out;
}

std::vector<int> probe_predictions(const GraphBundle& g, const TrainOutput& out,
                                   const LogregConfig& probe) {
  if (out.head) return predict(out.representations, *out.head);

  const Eigen::MatrixXd z = normalize_rows(out.representations);
  std::vector<int> fit_labels;
  std::vector<int> fit_rows;
  for (int i = 0; i < g.num_nodes; ++i) {
    if (g.split[i] != Split::train) continue;
    int best = 0;
    for (int j = 1; j < out.semantic_labels.cols(); ++j)
      if (out.semantic_labels(i, j) > out.semantic_labels(i, best)) best = j;
    fit_labels.push_back(best);
    fit_rows.push_back(i);
  }
  Eigen::MatrixXd z_train(fit_rows.size(), z.cols());
  for (std::size_t r = 0; r < fit_rows.size(); ++r)
    z_train.row(r) = z.row(fit_rows[r]);
  const Eigen::MatrixXd w = fit_logreg(z_train, fit_labels, g.num_classes, probe);
  return predict(z, w);
}

}  // namespace

TrainOutput run_training(const GraphBundle& g, const RunConfig& cfg) {
  g.validate();
  if (g.count(Split::train) == 0)
    throw std::runtime_error("trainer: bundle has no train nodes");
  if (g.count(Split::valid) == 0)
    throw std::runtime_error("trainer: bundle has no valid nodes");
  if (cfg.max_epochs < 0)
    throw std::runtime_error("trainer: max_epochs must be nonnegative");

  switch (cfg.objective) {
    case Objective::erase:
      return train_erase(g, cfg);
    case Objective::mcr2_plain:
      return train_mcr2_plain(g, cfg);
    case Objective::ce_baseline:
      return train_ce_baseline(g, cfg);
  }
  throw std::runtime_error("trainer: unknown objective");
}

double evaluate_test_accuracy(const GraphBundle& g, const TrainOutput& out,
                              const LogregConfig& probe) {
  return accuracy(probe_predictions(g, out, probe), g.labels, g.mask(Split::test));
}

std::vector<int> evaluate_predictions(const GraphBundle& g, const TrainOutput& out,
                                      const LogregConfig& probe) {
  return probe_predictions(g, out, probe);
}

}  // namespace erase
