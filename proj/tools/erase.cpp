// Command-line front end: corrupt labels, train encoders, evaluate runs,
// propagate labels, emit diagnostics, and sweep noise grids.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "erase/bundle_io.hpp"
#include "erase/diagnostics.hpp"
#include "erase/encoder.hpp"
#include "erase/graph.hpp"
#include "erase/noise.hpp"
#include "erase/propagation.hpp"
#include "erase/rate.hpp"
#include "erase/readout.hpp"
#include "erase/semantics.hpp"
#include "erase/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct MissingCheckpoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string percent(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * x);
  return buf;
}

erase::NoiseKind parse_kind(const std::string& s) {
  if (s == "sym") return erase::NoiseKind::symmetric;
  if (s == "asym") return erase::NoiseKind::asymmetric;
  throw CLI::ValidationError("--noise-kind", "expected sym or asym, got '" + s + "'");
}

erase::Objective parse_objective(const std::string& s) {
  if (s == "erase") return erase::Objective::erase;
  if (s == "mcr2_plain") return erase::Objective::mcr2_plain;
  if (s == "ce_baseline") return erase::Objective::ce_baseline;
  throw CLI::ValidationError(
      "--objective", "expected erase, mcr2_plain or ce_baseline, got '" + s + "'");
}

const char* objective_name(erase::Objective o) {
  switch (o) {
    case erase::Objective::erase: return "erase";
    case erase::Objective::mcr2_plain: return "mcr2_plain";
    case erase::Objective::ce_baseline: return "ce_baseline";
  }
  return "?";
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << j.dump(2) << "\n";
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open for reading");
  json j;
  in >> j;
  return j;
}

void write_matrix_tsv(const fs::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << erase::format_double(m(i, j));
    }
    out << "\n";
  }
}

Eigen::MatrixXd read_matrix_tsv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open for reading");
  std::vector<std::vector<double>> rows;
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::vector<double> row;
    double v;
    while (ss >> v) row.push_back(v);
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error(path.string() + ":" + std::to_string(ln) +
                               ": ragged matrix row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path.string() + ": empty matrix");
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

std::vector<int> read_labels_file(const fs::path& path, int num_nodes, int num_classes) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open for reading");
  std::vector<int> labels;
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (line.empty()) continue;
    try {
      labels.push_back(std::stoi(line));
    } catch (const std::exception&) {
      throw std::runtime_error(path.string() + ":" + std::to_string(ln) +
                               ": expected integer label");
    }
  }
  if (static_cast<int>(labels.size()) != num_nodes)
    throw std::runtime_error(path.string() + ": expected " +
                             std::to_string(num_nodes) + " labels, got " +
                             std::to_string(labels.size()));
  for (int y : labels)
    if (y < 0 || y >= num_classes)
      throw std::runtime_error(path.string() + ": label out of range");
  return labels;
}

erase::GraphBundle load_bundle_with_overrides(const std::string& bundle_dir,
                                              const std::string& labels_file) {
  erase::GraphBundle g = erase::load_bundle(bundle_dir);
  if (!labels_file.empty()) {
    g.labels = read_labels_file(labels_file, g.num_nodes, g.num_classes);
    g.validate();
  }
  return g;
}

int thread_budget(bool deterministic) {
  if (deterministic) return 1;
  if (const char* env = std::getenv("ERASE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw std::runtime_error("ERASE_THREADS must be a positive integer");
    return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string tok;
  std::istringstream ss(s);
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

// Training hyperparameters shared by train and sweep. Precedence:
// explicit flag > manifest entry > built-in default.
struct ConfigFlags {
  erase::RunConfig cfg;
  std::map<std::string, CLI::Option*> opts;
  std::string manifest_file;

  void attach(CLI::App* cmd) {
    opts["lr"] = cmd->add_option("--lr", cfg.lr, "learning rate");
    opts["weight_decay"] =
        cmd->add_option("--weight-decay", cfg.weight_decay, "l2 strength in adam");
    opts["hidden_dim"] =
        cmd->add_option("--hidden-dim", cfg.hidden_dim, "first layer width");
    opts["out_dim"] =
        cmd->add_option("--out-dim", cfg.out_dim, "representation width");
    opts["epsilon_sq"] = cmd->add_option("--epsilon-sq", cfg.epsilon_sq,
                                         "rate distortion tolerance, squared");
    opts["gamma"] =
        cmd->add_option("--gamma", cfg.gamma, "scale on the global rate term");
    opts["t1"] = cmd->add_option("--t1", cfg.t1, "denoising propagation steps");
    opts["t2"] = cmd->add_option("--t2", cfg.t2, "semantic propagation steps");
    opts["alpha1"] =
        cmd->add_option("--alpha1", cfg.alpha1, "denoising retention weight");
    opts["alpha2"] =
        cmd->add_option("--alpha2", cfg.alpha2, "semantic retention weight");
    opts["beta"] =
        cmd->add_option("--beta", cfg.beta, "denoised share of the semantic mix");
    opts["max_epochs"] = cmd->add_option("--max-epochs", cfg.max_epochs, "epoch cap");
    opts["patience"] = cmd->add_option(
        "--patience", cfg.patience, "epochs without val improvement before stopping");
    cmd->add_option("--manifest", manifest_file,
                    "json file with defaults for the flags above");
  }

  void apply_manifest() {
    if (manifest_file.empty()) return;
    const json m = read_json(manifest_file);
    auto want = [&](const char* key) {
      return m.contains(key) && opts.at(key)->count() == 0;
    };
    if (want("lr")) cfg.lr = m["lr"].get<double>();
    if (want("weight_decay")) cfg.weight_decay = m["weight_decay"].get<double>();
    if (want("hidden_dim")) cfg.hidden_dim = m["hidden_dim"].get<int>();
    if (want("out_dim")) cfg.out_dim = m["out_dim"].get<int>();
    if (want("epsilon_sq")) cfg.epsilon_sq = m["epsilon_sq"].get<double>();
    if (want("gamma")) cfg.gamma = m["gamma"].get<double>();
    if (want("t1")) cfg.t1 = m["t1"].get<int>();
    if (want("t2")) cfg.t2 = m["t2"].get<int>();
    if (want("alpha1")) cfg.alpha1 = m["alpha1"].get<double>();
    if (want("alpha2")) cfg.alpha2 = m["alpha2"].get<double>();
    if (want("beta")) cfg.beta = m["beta"].get<double>();
    if (want("max_epochs")) cfg.max_epochs = m["max_epochs"].get<int>();
    if (want("patience")) cfg.patience = m["patience"].get<int>();
  }
};

json config_json(const erase::RunConfig& cfg) {
  json j;
  j["lr"] = cfg.lr;
  j["weight_decay"] = cfg.weight_decay;
  j["hidden_dim"] = cfg.hidden_dim;
  j["out_dim"] = cfg.out_dim;
  j["epsilon_sq"] = cfg.epsilon_sq;
  j["gamma"] = cfg.gamma;
  j["t1"] = cfg.t1;
  j["t2"] = cfg.t2;
  j["alpha1"] = cfg.alpha1;
  j["alpha2"] = cfg.alpha2;
  j["beta"] = cfg.beta;
  j["max_epochs"] = cfg.max_epochs;
  j["patience"] = cfg.patience;
  return j;
}

std::vector<int> argmax_rows(const Eigen::MatrixXd& m) {
  std::vector<int> out(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    int best = 0;
    for (Eigen::Index j = 1; j < m.cols(); ++j)
      if (m(i, j) > m(i, best)) best = static_cast<int>(j);
    out[i] = best;
  }
  return out;
}

void write_labels_tsv(const fs::path& path, const std::vector<int>& labels) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  for (int y : labels) out << y << "\n";
}

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;
};

Stats sample_stats(const std::vector<double>& xs) {
  Stats s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

// ---------------------------------------------------------------------------
// synth

int cmd_synth(const erase::SbmConfig& cfg, const std::string& out) {
  const erase::GraphBundle g = erase::generate_sbm(cfg);
  erase::save_bundle(g, out);
  std::cout << "wrote " << g.num_nodes << " nodes, " << g.edges.size()
            << " edges -> " << out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// corrupt

struct CorruptArgs {
  std::string bundle, out;
  std::string kind = "sym";
  double rate = 0.0;
  std::uint64_t seed = 0;
};

int cmd_corrupt(const CorruptArgs& a) {
  erase::GraphBundle g = erase::load_bundle(a.bundle);
  const std::vector<bool> train_mask = g.mask(erase::Split::train);
  const erase::NoiseSpec spec{parse_kind(a.kind), a.rate, a.seed};
  const std::vector<int> noisy =
      erase::corrupt_labels(g.labels, g.num_classes, train_mask, spec);

  int changed = 0;
  for (std::size_t i = 0; i < noisy.size(); ++i) changed += (noisy[i] != g.labels[i]);
  g.labels = noisy;
  erase::save_bundle(g, a.out);
  write_labels_tsv(fs::path(a.out) / "labels_noisy.tsv", noisy);

  json meta;
  meta["spec_version"] = erase::kSpecVersion;
  meta["kind"] = a.kind;
  meta["rate"] = a.rate;
  meta["seed"] = a.seed;
  meta["num_train"] = g.count(erase::Split::train);
  meta["num_changed"] = changed;
  write_json(fs::path(a.out) / "noise_meta.json", meta);

  std::cout << "corrupted " << changed << "/" << g.count(erase::Split::train)
            << " train labels -> " << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string bundle, labels, out;
  std::string objective = "erase";
  std::string noise_kind = "sym";
  double noise_rate = 0.0;
  std::uint64_t seed = 0;
  int reps = 1;
};

// metrics.json keeps the per-epoch objective trace under "delta_r"; for
// ce_baseline that array holds the negated train loss (see TrainOutput).
void write_run(const fs::path& dir, const erase::TrainOutput& out,
               const erase::RunConfig& cfg, const std::string& noise_kind,
               double noise_rate) {
  fs::create_directories(dir);
  erase::save_checkpoint((dir / "checkpoint.bin").string(), out.encoder,
                         out.head ? &*out.head : nullptr);
  write_matrix_tsv(dir / "representations.tsv", out.representations);
  write_matrix_tsv(dir / "semantic_labels.tsv", out.semantic_labels);

  json m;
  m["spec_version"] = erase::kSpecVersion;
  m["objective"] = objective_name(cfg.objective);
  m["seed"] = cfg.seed;
  m["best_epoch"] = out.best_epoch;
  m["epochs_run"] = out.val_acc_history.size();
  if (out.best_epoch > 0)
    m["best_val_acc"] = out.val_acc_history.at(out.best_epoch - 1);
  if (!out.objective_history.empty())
    m["final_objective"] = out.objective_history.back();
  m["delta_r"] = out.objective_history;
  m["val_acc"] = out.val_acc_history;
  m["config"] = config_json(cfg);
  if (noise_rate > 0.0) {
    m["noise"] = {{"kind", noise_kind}, {"rate", noise_rate}, {"seed", cfg.seed}};
  }
  write_json(dir / "metrics.json", m);
}

int cmd_train(const TrainArgs& a, ConfigFlags& flags) {
  flags.apply_manifest();
  const erase::GraphBundle base = load_bundle_with_overrides(a.bundle, a.labels);
  const std::vector<bool> train_mask = base.mask(erase::Split::train);

  for (int rep = 0; rep < a.reps; ++rep) {
    erase::RunConfig cfg = flags.cfg;
    cfg.objective = parse_objective(a.objective);
    cfg.seed = a.seed + static_cast<std::uint64_t>(rep);

    erase::GraphBundle g = base;
    if (a.noise_rate > 0.0) {
      const erase::NoiseSpec spec{parse_kind(a.noise_kind), a.noise_rate, cfg.seed};
      g.labels = erase::corrupt_labels(base.labels, base.num_classes, train_mask, spec);
    }

    const erase::TrainOutput out = erase::run_training(g, cfg);
    const fs::path dir = fs::path(a.out) / ("run_seed" + std::to_string(cfg.seed));
    write_run(dir, out, cfg, a.noise_kind, a.noise_rate);
    std::cout << dir.string() << ": best_epoch=" << out.best_epoch;
    if (out.best_epoch > 0)
      std::cout << " val_acc=" << percent(out.val_acc_history.at(out.best_epoch - 1));
    std::cout << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string bundle, labels, runs, out;
  erase::LogregConfig probe;
  bool raw_labels = false;  // ablation: probe on observed train labels
};

std::vector<fs::path> find_run_dirs(const fs::path& root) {
  std::vector<std::pair<std::uint64_t, fs::path>> found;
  if (!fs::is_directory(root))
    throw std::runtime_error(root.string() + ": not a directory");
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_directory()) continue;
    const std::string name = entry.path().filename().string();
    if (name.rfind("run_seed", 0) != 0) continue;
    std::uint64_t key = 0;
    try {
      key = std::stoull(name.substr(8));
    } catch (const std::exception&) {
      continue;
    }
    found.push_back({key, entry.path()});
  }
  std::sort(found.begin(), found.end());
  std::vector<fs::path> dirs;
  for (auto& [k, p] : found) dirs.push_back(std::move(p));
  if (dirs.empty()) throw std::runtime_error(root.string() + ": no run_seed* dirs");
  return dirs;
}

int cmd_eval(const EvalArgs& a) {
  const erase::GraphBundle g = load_bundle_with_overrides(a.bundle, a.labels);
  const erase::SparseAdjacency adj = erase::SparseAdjacency::from_edges(g.num_nodes, g.edges);
  const erase::SparseAdjacency adj_enc = erase::symmetric_normalize(adj, true);
  const std::vector<bool> test_mask = g.mask(erase::Split::test);

  json runs = json::array();
  std::vector<double> accs;
  for (const fs::path& dir : find_run_dirs(a.runs)) {
    const fs::path ckp_path = dir / "checkpoint.bin";
    if (!fs::exists(ckp_path))
      throw MissingCheckpoint(dir.string() + ": run dir has no checkpoint.bin");
    const erase::Checkpoint ckp = erase::load_checkpoint(ckp_path.string());
    const Eigen::MatrixXd z = erase::encoder_forward(adj_enc, g.features, ckp.encoder).z;

    std::vector<int> pred;
    if (ckp.head) {
      pred = erase::predict(z, *ckp.head);
    } else {
      const Eigen::MatrixXd sem = read_matrix_tsv(dir / "semantic_labels.tsv");
      if (sem.rows() != g.num_nodes || sem.cols() != g.num_classes)
        throw std::runtime_error(dir.string() + ": semantic label shape mismatch");
      const std::vector<int> sem_argmax = argmax_rows(sem);
      const Eigen::MatrixXd zn = erase::normalize_rows(z);
      std::vector<int> fit_labels;
      std::vector<int> fit_rows;
      for (int i = 0; i < g.num_nodes; ++i) {
        if (g.split[i] != erase::Split::train) continue;
        fit_labels.push_back(a.raw_labels ? g.labels[i] : sem_argmax[i]);
        fit_rows.push_back(i);
      }
      Eigen::MatrixXd z_train(fit_rows.size(), zn.cols());
      for (std::size_t r = 0; r < fit_rows.size(); ++r)
        z_train.row(r) = zn.row(fit_rows[r]);
      const Eigen::MatrixXd w =
          erase::fit_logreg(z_train, fit_labels, g.num_classes, a.probe);
      pred = erase::predict(zn, w);
    }
    write_labels_tsv(dir / "predictions.tsv", pred);

    const double acc = erase::accuracy(pred, g.labels, test_mask);
    accs.push_back(acc);
    runs.push_back({{"dir", dir.filename().string()}, {"test_acc", acc}});
    std::cout << dir.string() << ": test_acc=" << percent(acc) << "\n";
  }

  const Stats st = sample_stats(accs);
  json summary;
  summary["spec_version"] = erase::kSpecVersion;
  summary["num_runs"] = accs.size();
  summary["runs"] = runs;
  summary["mean_test_acc"] = st.mean;
  summary["std_test_acc"] = st.stddev;
  summary["formatted"] = percent(st.mean) + " ± " + percent(st.stddev);
  const fs::path out_path =
      a.out.empty() ? fs::path(a.runs) / "summary.json" : fs::path(a.out);
  write_json(out_path, summary);
  std::cout << "mean test acc: " << summary["formatted"].get<std::string>() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// propagate

struct PropagateArgs {
  std::string bundle, labels, out;
  std::string noise_kind = "sym";
  double noise_rate = 0.0;
  std::uint64_t seed = 0;
  double alpha1 = 0.6;
  int t1 = 5;
  double alpha2 = 0.6;
  int t2 = 0;
};

int cmd_propagate(const PropagateArgs& a) {
  const erase::GraphBundle base = load_bundle_with_overrides(a.bundle, a.labels);
  const std::vector<bool> train_mask = base.mask(erase::Split::train);

  std::vector<int> observed = base.labels;
  if (a.noise_rate > 0.0) {
    const erase::NoiseSpec spec{parse_kind(a.noise_kind), a.noise_rate, a.seed};
    observed = erase::corrupt_labels(base.labels, base.num_classes, train_mask, spec);
  }

  const erase::SparseAdjacency adj =
      erase::SparseAdjacency::from_edges(base.num_nodes, base.edges);
  const Eigen::MatrixXd l0 =
      erase::init_label_matrix(observed, base.num_classes, train_mask);
  const Eigen::MatrixXd denoised =
      erase::denoise_labels(adj, train_mask, l0, a.alpha1, a.t1);

  fs::create_directories(a.out);
  write_matrix_tsv(fs::path(a.out) / "denoised.tsv", denoised);
  const std::vector<int> assignment = argmax_rows(denoised);
  write_labels_tsv(fs::path(a.out) / "assignment.tsv", assignment);
  if (a.t2 > 0) {
    const Eigen::MatrixXd propagated =
        erase::semantic_propagate(adj, denoised, a.alpha2, a.t2);
    write_matrix_tsv(fs::path(a.out) / "propagated.tsv", propagated);
  }

  int flipped = 0, match_observed = 0, match_true = 0, n_train = 0;
  for (int i = 0; i < base.num_nodes; ++i) {
    if (!train_mask[i]) continue;
    ++n_train;
    flipped += (observed[i] != base.labels[i]);
    match_observed += (assignment[i] == observed[i]);
    match_true += (assignment[i] == base.labels[i]);
  }

  json stats;
  stats["spec_version"] = erase::kSpecVersion;
  stats["num_train"] = n_train;
  stats["alpha1"] = a.alpha1;
  stats["t1"] = a.t1;
  stats["train_flipped_by_noise"] = flipped;
  stats["denoised_matches_observed_train"] = match_observed;
  if (a.noise_rate > 0.0) stats["denoised_matches_true_train"] = match_true;
  write_json(fs::path(a.out) / "stats.json", stats);
  std::cout << "denoised argmax matches observed on " << match_observed << "/"
            << n_train << " train nodes\n";
  return 0;
}

// ---------------------------------------------------------------------------
// diagnose

struct DiagnoseArgs {
  std::string bundle, labels, run, clean_twin, out;
  int sample_cap = 500;
  std::uint64_t seed = 0;
  double epsilon_sq = 0.05;
};

Eigen::MatrixXd run_representations(const fs::path& run_dir, const erase::GraphBundle& g,
                                    const erase::SparseAdjacency& adj_enc) {
  const fs::path ckp_path = run_dir / "checkpoint.bin";
  if (!fs::exists(ckp_path))
    throw MissingCheckpoint(run_dir.string() + ": run dir has no checkpoint.bin");
  const erase::Checkpoint ckp = erase::load_checkpoint(ckp_path.string());
  return erase::encoder_forward(adj_enc, g.features, ckp.encoder).z;
}

int cmd_diagnose(const DiagnoseArgs& a) {
  const erase::GraphBundle g = load_bundle_with_overrides(a.bundle, a.labels);
  const erase::SparseAdjacency adj =
      erase::SparseAdjacency::from_edges(g.num_nodes, g.edges);
  const erase::SparseAdjacency adj_enc = erase::symmetric_normalize(adj, true);
  const Eigen::MatrixXd z = run_representations(a.run, g, adj_enc);

  fs::create_directories(a.out);
  // Geometry plots draw on the test split only, class-sorted and capped.
  const std::vector<int> nodes = erase::stratified_sample(
      g.labels, g.mask(erase::Split::test), g.num_classes, a.sample_cap, a.seed);

  {
    const Eigen::MatrixXd cos = erase::cosine_matrix(z, nodes);
    std::ofstream out(fs::path(a.out) / "cosmat.csv");
    for (Eigen::Index i = 0; i < cos.rows(); ++i) {
      for (Eigen::Index j = 0; j < cos.cols(); ++j) {
        if (j) out << ',';
        out << erase::format_double(cos(i, j));
      }
      out << "\n";
    }
  }
  {
    const Eigen::MatrixXd coords = erase::pca_2d(z, nodes);
    std::ofstream out(fs::path(a.out) / "pca.csv");
    out << "pc1,pc2,class\n";
    for (std::size_t r = 0; r < nodes.size(); ++r)
      out << erase::format_double(coords(r, 0)) << ','
          << erase::format_double(coords(r, 1)) << ',' << g.labels[nodes[r]] << "\n";
  }

  // Prototype geometry under the run's own propagation settings when its
  // metrics file is present; defaults otherwise.
  double alpha1 = 0.6;
  int t1 = 5;
  const fs::path metrics_path = fs::path(a.run) / "metrics.json";
  if (fs::exists(metrics_path)) {
    const json m = read_json(metrics_path);
    if (m.contains("config")) {
      alpha1 = m["config"].value("alpha1", alpha1);
      t1 = m["config"].value("t1", t1);
    }
  }
  const std::vector<bool> train_mask = g.mask(erase::Split::train);
  const Eigen::MatrixXd l0 = erase::init_label_matrix(g.labels, g.num_classes, train_mask);
  const Eigen::MatrixXd denoised = erase::denoise_labels(adj, train_mask, l0, alpha1, t1);
  const std::vector<int> assignment =
      erase::to_membership(denoised, g.num_classes).assignment;
  const erase::PrototypeSet protos =
      erase::estimate_prototypes(z, assignment, train_mask, g.num_classes);

  json diag;
  diag["spec_version"] = erase::kSpecVersion;
  diag["sample_size"] = nodes.size();
  diag["max_prototype_cosine"] = erase::max_prototype_cosine(protos);
  int populated = 0;
  for (bool p : protos.populated) populated += p;
  diag["populated_classes"] = populated;
  write_json(fs::path(a.out) / "diagnostics.json", diag);

  if (!a.clean_twin.empty()) {
    const Eigen::MatrixXd z_clean = run_representations(a.clean_twin, g, adj_enc);
    if (z_clean.rows() != z.rows() || z_clean.cols() != z.cols())
      throw std::runtime_error("diagnose: clean twin representation shape mismatch");
    const Eigen::MatrixXd delta = z - z_clean;
    const erase::LogVolume lv = erase::log_volume(delta);
    json nj;
    nj["spec_version"] = erase::kSpecVersion;
    nj["epsilon_sq"] = a.epsilon_sq;
    nj["ntvr"] = erase::ntvr(delta, a.epsilon_sq);
    nj["logvol_delta"] = lv.value;
    nj["logvol_reference"] =
        erase::gaussian_log_volume(static_cast<int>(delta.cols()), a.epsilon_sq);
    nj["rank_deficient"] = lv.rank_deficient;
    write_json(fs::path(a.out) / "ntvr.json", nj);
    std::cout << "ntvr=" << nj["ntvr"].get<double>() << "\n";
  }
  std::cout << "diagnostics written to " << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
  std::string bundle, labels, out;
  std::string kinds = "sym";
  std::string rates = "0.0";
  std::string objectives = "erase";
  std::uint64_t seed = 0;
  int reps = 1;
  bool deterministic = false;
};

struct SweepCell {
  std::string kind;
  double rate = 0.0;
  std::string rate_str;  // as given on the command line, used in paths and csv
  std::string objective;
  std::vector<double> accs;
};

int cmd_sweep(const SweepArgs& a, ConfigFlags& flags) {
  flags.apply_manifest();
  const erase::GraphBundle base = load_bundle_with_overrides(a.bundle, a.labels);
  const std::vector<bool> train_mask = base.mask(erase::Split::train);

  const std::vector<std::string> kinds = split_csv(a.kinds);
  const std::vector<std::string> objectives = split_csv(a.objectives);
  const std::vector<std::string> rate_strs = split_csv(a.rates);
  if (kinds.empty() || rate_strs.empty() || objectives.empty() || a.reps < 1)
    throw std::runtime_error("sweep: grid has no cells");
  for (const std::string& k : kinds) parse_kind(k);
  for (const std::string& o : objectives) parse_objective(o);

  struct Job {
    std::size_t cell;
    int rep;
  };
  std::vector<SweepCell> cells;
  std::vector<Job> jobs;
  for (const std::string& kind : kinds)
    for (const std::string& rate_str : rate_strs)
      for (const std::string& obj : objectives) {
        cells.push_back(
            {kind, std::stod(rate_str), rate_str, obj, std::vector<double>(a.reps, 0.0)});
        for (int rep = 0; rep < a.reps; ++rep)
          jobs.push_back({cells.size() - 1, rep});
      }

  fs::create_directories(a.out);
  const int threads = std::min<int>(thread_budget(a.deterministic),
                                    static_cast<int>(jobs.size()));
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    erase::GraphBundle local = base;  // one bundle copy per thread
    for (;;) {
      const std::size_t j = cursor.fetch_add(1);
      if (j >= jobs.size()) break;
      const Job job = jobs[j];
      SweepCell& cell = cells[job.cell];

      erase::RunConfig cfg = flags.cfg;
      cfg.objective = parse_objective(cell.objective);
      cfg.seed = a.seed + static_cast<std::uint64_t>(job.rep);

      local.labels = base.labels;
      if (cell.rate > 0.0) {
        const erase::NoiseSpec spec{parse_kind(cell.kind), cell.rate, cfg.seed};
        local.labels =
            erase::corrupt_labels(base.labels, base.num_classes, train_mask, spec);
      }
      const erase::TrainOutput out = erase::run_training(local, cfg);
      cell.accs[job.rep] = erase::evaluate_test_accuracy(local, out);
      const fs::path dir = fs::path(a.out) /
                           (cell.kind + "_" + cell.rate_str + "_" + cell.objective) /
                           ("run_seed" + std::to_string(cfg.seed));
      write_run(dir, out, cfg, cell.kind, cell.rate);
    }
  };
  {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::sort(cells.begin(), cells.end(), [](const SweepCell& x, const SweepCell& y) {
    if (x.kind != y.kind) return x.kind < y.kind;
    if (x.rate != y.rate) return x.rate < y.rate;
    return x.objective < y.objective;
  });

  {
    std::ofstream out(fs::path(a.out) / "table.csv");
    out << "noise_kind,rate,objective,mean_acc,std_acc\n";
    for (const SweepCell& c : cells) {
      const Stats st = sample_stats(c.accs);
      out << c.kind << ',' << c.rate_str << ',' << c.objective << ','
          << erase::format_double(st.mean) << ',' << erase::format_double(st.stddev)
          << "\n";
    }
  }
  json sweep;
  sweep["spec_version"] = erase::kSpecVersion;
  sweep["seed"] = a.seed;
  sweep["reps"] = a.reps;
  sweep["config"] = config_json(flags.cfg);
  sweep["cells"] = json::array();
  for (const SweepCell& c : cells) {
    const Stats st = sample_stats(c.accs);
    sweep["cells"].push_back({{"kind", c.kind},
                              {"rate", c.rate},
                              {"objective", c.objective},
                              {"accs", c.accs},
                              {"mean_acc", st.mean},
                              {"std_acc", st.stddev},
                              {"formatted", percent(st.mean) + " ± " +
                                                percent(st.stddev)}});
  }
  write_json(fs::path(a.out) / "sweep.json", sweep);
  std::cout << "sweep results in " << a.out << " (" << cells.size() << " cells, "
            << threads << " threads)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"error-resilient graph representation learning under label noise"};
  app.require_subcommand(1);

  // Everything but sweep is single-threaded by construction; the flag is
  // accepted everywhere so scripted reruns can pass it uniformly.
  bool always_deterministic = false;
  auto accept_deterministic = [&](CLI::App* cmd) {
    cmd->add_flag("--deterministic", always_deterministic,
                  "no-op here; this command is always deterministic");
  };

  erase::SbmConfig synth_cfg;
  std::string synth_out;
  CLI::App* sy = app.add_subcommand("synth", "generate a planted-partition bundle");
  sy->add_option("--blocks", synth_cfg.num_blocks, "number of blocks / classes")
      ->check(CLI::PositiveNumber);
  sy->add_option("--nodes-per-block", synth_cfg.nodes_per_block, "block size")
      ->check(CLI::PositiveNumber);
  sy->add_option("--p-in", synth_cfg.p_in, "within-block edge probability")
      ->check(CLI::Range(0.0, 1.0));
  sy->add_option("--p-out", synth_cfg.p_out, "cross-block edge probability")
      ->check(CLI::Range(0.0, 1.0));
  sy->add_option("--feature-dim", synth_cfg.feature_dim, "feature width")
      ->check(CLI::PositiveNumber);
  sy->add_option("--feature-shift", synth_cfg.feature_shift,
                 "block mean offset along one axis");
  sy->add_option("--seed", synth_cfg.seed, "rng seed");
  sy->add_option("--train-per-block", synth_cfg.train_per_block, "train quota")
      ->check(CLI::PositiveNumber);
  sy->add_option("--valid-per-block", synth_cfg.valid_per_block, "valid quota")
      ->check(CLI::PositiveNumber);
  sy->add_option("--out", synth_out, "output bundle directory")->required();
  accept_deterministic(sy);

  CorruptArgs corrupt;
  CLI::App* c = app.add_subcommand("corrupt", "resample train labels through a noise model");
  c->add_option("--bundle", corrupt.bundle, "input bundle directory")->required();
  c->add_option("--noise-kind", corrupt.kind, "sym or asym");
  c->add_option("--noise-rate", corrupt.rate, "flip probability")
      ->check(CLI::Range(0.0, 1.0));
  c->add_option("--seed", corrupt.seed, "rng seed");
  c->add_option("--out", corrupt.out, "output bundle directory")->required();
  accept_deterministic(c);

  TrainArgs train;
  ConfigFlags train_flags;
  CLI::App* t = app.add_subcommand("train", "train an encoder, one run per rep");
  t->add_option("--bundle", train.bundle, "bundle directory")->required();
  t->add_option("--labels", train.labels, "labels file overriding the bundle's");
  t->add_option("--objective", train.objective, "erase, mcr2_plain or ce_baseline");
  t->add_option("--noise-kind", train.noise_kind, "sym or asym");
  t->add_option("--noise-rate", train.noise_rate,
                "corrupt train labels in-process before each rep")
      ->check(CLI::Range(0.0, 1.0));
  t->add_option("--seed", train.seed, "base seed; rep r uses seed + r");
  t->add_option("--reps", train.reps, "number of runs")->check(CLI::PositiveNumber);
  t->add_option("--out", train.out, "directory receiving run_seed* dirs")->required();
  train_flags.attach(t);
  accept_deterministic(t);

  EvalArgs eval_args;
  CLI::App* e = app.add_subcommand("eval", "score finished runs on the test split");
  e->add_option("--bundle", eval_args.bundle, "bundle directory")->required();
  e->add_option("--labels", eval_args.labels, "labels file overriding the bundle's");
  e->add_option("--runs", eval_args.runs, "directory containing run_seed* dirs")
      ->required();
  e->add_option("--out", eval_args.out, "summary path (default <runs>/summary.json)");
  e->add_option("--probe-l2", eval_args.probe.l2, "probe l2 strength");
  e->add_option("--probe-iters", eval_args.probe.iters, "probe gd iterations");
  e->add_option("--probe-lr", eval_args.probe.lr, "probe learning rate");
  e->add_flag("--probe-raw-labels", eval_args.raw_labels,
              "ablation: fit the probe on observed train labels, not semantic ones");
  accept_deterministic(e);

  PropagateArgs prop;
  CLI::App* p = app.add_subcommand("propagate", "run label propagation by itself");
  p->add_option("--bundle", prop.bundle, "bundle directory")->required();
  p->add_option("--labels", prop.labels, "labels file overriding the bundle's");
  p->add_option("--noise-kind", prop.noise_kind, "sym or asym");
  p->add_option("--noise-rate", prop.noise_rate, "corrupt train labels first")
      ->check(CLI::Range(0.0, 1.0));
  p->add_option("--seed", prop.seed, "rng seed for the optional corruption");
  p->add_option("--alpha1", prop.alpha1, "denoising retention weight");
  p->add_option("--t1", prop.t1, "denoising steps");
  p->add_option("--alpha2", prop.alpha2, "semantic retention weight");
  p->add_option("--t2", prop.t2, "semantic steps over the full graph (0 = skip)");
  p->add_option("--out", prop.out, "output directory")->required();
  accept_deterministic(p);

  DiagnoseArgs diag;
  CLI::App* d = app.add_subcommand("diagnose", "geometry reports for a finished run");
  d->add_option("--bundle", diag.bundle, "bundle directory")->required();
  d->add_option("--labels", diag.labels, "labels file overriding the bundle's");
  d->add_option("--run", diag.run, "run directory with checkpoint.bin")->required();
  d->add_option("--clean-twin", diag.clean_twin,
                "run directory trained without noise, enables the volume ratio");
  d->add_option("--sample-cap", diag.sample_cap, "max sampled nodes")
      ->check(CLI::PositiveNumber);
  d->add_option("--seed", diag.seed, "sampling seed");
  d->add_option("--epsilon-sq", diag.epsilon_sq, "tolerance for the volume ratio");
  d->add_option("--out", diag.out, "output directory")->required();
  accept_deterministic(d);

  SweepArgs sweep;
  ConfigFlags sweep_flags;
  CLI::App* s = app.add_subcommand("sweep", "grid over noise kinds, rates, objectives");
  s->add_option("--bundle", sweep.bundle, "bundle directory")->required();
  s->add_option("--labels", sweep.labels, "labels file overriding the bundle's");
  s->add_option("--kinds", sweep.kinds, "comma list of sym,asym");
  s->add_option("--rates", sweep.rates, "comma list of flip probabilities");
  s->add_option("--objectives", sweep.objectives, "comma list of objectives");
  s->add_option("--seed", sweep.seed, "base seed; rep r uses seed + r");
  s->add_option("--reps", sweep.reps, "runs per cell")->check(CLI::PositiveNumber);
  s->add_flag("--deterministic", sweep.deterministic,
              "single-threaded execution regardless of ERASE_THREADS");
  s->add_option("--out", sweep.out, "output directory")->required();
  sweep_flags.attach(s);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sy->parsed()) return cmd_synth(synth_cfg, synth_out);
    if (c->parsed()) return cmd_corrupt(corrupt);
    if (t->parsed()) return cmd_train(train, train_flags);
    if (e->parsed()) return cmd_eval(eval_args);
    if (p->parsed()) return cmd_propagate(prop);
    if (d->parsed()) return cmd_diagnose(diag);
    if (s->parsed()) return cmd_sweep(sweep, sweep_flags);
  } catch (const MissingCheckpoint& err) {
    std::cerr << "erase: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "erase: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
