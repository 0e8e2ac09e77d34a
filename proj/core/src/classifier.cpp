#include "labeldist/classifier.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "labeldist/calibration.hpp"
#include "labeldist/errors.hpp"
#include "labeldist/metrics.hpp"
#include "labeldist/rng.hpp"

namespace labeldist {

namespace {

constexpr double kInitStd = 0.01;
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

void check_example(const TrainExample& ex, int dim) {
  if (static_cast<int>(ex.x.size()) != dim)
    throw InputError("training example feature dimension " +
                     std::to_string(ex.x.size()) + " does not match model dim " +
                     std::to_string(dim));
  validate_distribution(ex.target, "training target");
}

double full_data_loss(const ClassifierParams& params,
                      std::span<const TrainExample> dataset, LossKind loss) {
  return loss_and_grad(params, dataset, loss).first;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::uint64_t train_config_hash(const TrainConfig& config) {
  std::ostringstream os;
  os << "lr=" << format_double(config.learning_rate)
     << ";batch=" << config.batch_size << ";e1=" << config.epochs_phase1
     << ";e2=" << config.epochs_phase2
     << ";loss=" << (config.loss == LossKind::CrossEntropy ? "ce" : "kl")
     << ";opt=" << (config.optimizer == Optimizer::Sgd ? "sgd" : "adam")
     << ";seed=" << config.seed;
  return fnv1a64(os.str());
}

ClassifierParams init_params(int dim, std::uint64_t seed) {
  if (dim < 1) throw InputError("init_params: dim must be >= 1");
  ClassifierParams params;
  params.dim = dim;
  params.weights.resize(static_cast<std::size_t>(kNumLabels) * dim);
  Rng rng(derive_seed(seed, "classifier-init"));
  for (double& w : params.weights) w = kInitStd * rng.normal();
  return params;
}

std::array<double, kNumLabels> forward(const ClassifierParams& params,
                                       std::span<const double> x) {
  if (static_cast<int>(x.size()) != params.dim)
    throw InputError("forward: feature dimension mismatch");
  std::array<double, kNumLabels> logits{};
  for (int k = 0; k < kNumLabels; ++k) {
    double acc = params.bias[k];
    const double* row = params.weights.data() + static_cast<std::size_t>(k) * params.dim;
    for (int j = 0; j < params.dim; ++j) acc += row[j] * x[j];
    logits[k] = acc;
  }
  return logits;
}

std::pair<double, Gradient> loss_and_grad(const ClassifierParams& params,
                                          std::span<const TrainExample> batch,
                                          LossKind loss) {
  if (batch.empty()) throw InputError("loss_and_grad: empty batch");
  Gradient grad;
  grad.weights.assign(params.weights.size(), 0.0);
  double total_loss = 0.0;
  for (const TrainExample& ex : batch) {
    check_example(ex, params.dim);
    const LabelDistribution probs = softmax(forward(params, ex.x));
    for (int k = 0; k < kNumLabels; ++k) {
      const double t = ex.target[k];
      if (t > 0.0) {
        // probs from exp() are strictly positive except after extreme
        // underflow; the clamp only guards that path.
        total_loss -= t * std::log(std::max(probs[k], 1e-300));
        if (loss == LossKind::Kl) total_loss += t * std::log(t);
      }
      const double delta = probs[k] - t;
      grad.bias[k] += delta;
      double* row = grad.weights.data() + static_cast<std::size_t>(k) * params.dim;
      for (int j = 0; j < params.dim; ++j) row[j] += delta * ex.x[j];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  total_loss *= inv_n;
  for (double& g : grad.weights) g *= inv_n;
  for (double& g : grad.bias) g *= inv_n;
  return {total_loss, std::move(grad)};
}

TrainResult train(const ClassifierParams& params,
                  std::span<const TrainExample> dataset,
                  const TrainConfig& config, int epochs, LossKind loss) {
  if (dataset.empty()) throw InputError("train: empty dataset");
  if (epochs < 0) throw InputError("train: epochs must be >= 0");
  if (config.batch_size < 1) throw InputError("train: batch_size must be >= 1");
  if (!(config.learning_rate > 0.0))
    throw InputError("train: learning rate must be positive");
  for (const TrainExample& ex : dataset) check_example(ex, params.dim);

  TrainResult result;
  result.params = params;
  const std::size_t n = dataset.size();

  std::vector<Label> gold(n);
  for (std::size_t i = 0; i < n; ++i) gold[i] = argmax_label(dataset[i].target);
  std::vector<double> gold_prob_sum(n, 0.0);
  std::vector<double> gold_prob_sq_sum(n, 0.0);

  result.epoch_losses.push_back(full_data_loss(result.params, dataset, loss));

  Rng shuffle_rng(derive_seed(config.seed, "train-shuffle"));
  std::vector<std::uint32_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);

  // Adam moment state, lazily used.
  std::vector<double> m_w, v_w;
  std::array<double, kNumLabels> m_b{}, v_b{};
  if (config.optimizer == Optimizer::Adam) {
    m_w.assign(result.params.weights.size(), 0.0);
    v_w.assign(result.params.weights.size(), 0.0);
  }
  std::int64_t step = 0;

  std::vector<TrainExample> batch;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t end = std::min(n, start + config.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(dataset[order[i]]);
      auto [batch_loss, grad] = loss_and_grad(result.params, batch, loss);
      (void)batch_loss;
      ++step;
      if (config.optimizer == Optimizer::Sgd) {
        for (std::size_t i = 0; i < grad.weights.size(); ++i)
          result.params.weights[i] -= config.learning_rate * grad.weights[i];
        for (int k = 0; k < kNumLabels; ++k)
          result.params.bias[k] -= config.learning_rate * grad.bias[k];
      } else {
        const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(step));
        const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(step));
        for (std::size_t i = 0; i < grad.weights.size(); ++i) {
          m_w[i] = kAdamBeta1 * m_w[i] + (1.0 - kAdamBeta1) * grad.weights[i];
          v_w[i] = kAdamBeta2 * v_w[i] + (1.0 - kAdamBeta2) * grad.weights[i] * grad.weights[i];
          result.params.weights[i] -=
              config.learning_rate * (m_w[i] / bc1) / (std::sqrt(v_w[i] / bc2) + kAdamEps);
        }
        for (int k = 0; k < kNumLabels; ++k) {
          m_b[k] = kAdamBeta1 * m_b[k] + (1.0 - kAdamBeta1) * grad.bias[k];
          v_b[k] = kAdamBeta2 * v_b[k] + (1.0 - kAdamBeta2) * grad.bias[k] * grad.bias[k];
          result.params.bias[k] -=
              config.learning_rate * (m_b[k] / bc1) / (std::sqrt(v_b[k] / bc2) + kAdamEps);
        }
      }
    }
    result.epoch_losses.push_back(full_data_loss(result.params, dataset, loss));
    for (std::size_t i = 0; i < n; ++i) {
      const LabelDistribution probs = softmax(forward(result.params, dataset[i].x));
      const double p = probs[gold[i]];
      gold_prob_sum[i] += p;
      gold_prob_sq_sum[i] += p * p;
    }
  }

  result.dynamics.resize(n);
  if (epochs > 0) {
    const double e = static_cast<double>(epochs);
    for (std::size_t i = 0; i < n; ++i) {
      const double mean = gold_prob_sum[i] / e;
      const double var = std::max(0.0, gold_prob_sq_sum[i] / e - mean * mean);
      result.dynamics[i] = {mean, std::sqrt(var)};
    }
  }
  return result;
}

TwoPhaseResult two_phase_train(std::span<const TrainExample> singles,
                               std::span<const TrainExample> multis,
                               const TrainConfig& config) {
  if (singles.empty()) throw InputError("two_phase_train: empty single-annotated set");
  const int dim = static_cast<int>(singles.front().x.size());
  ClassifierParams params = init_params(dim, config.seed);

  TrainResult phase1 =
      train(params, singles, config, config.epochs_phase1, LossKind::CrossEntropy);

  TwoPhaseResult result;
  result.phase1_params = phase1.params;
  result.phase1_dynamics = std::move(phase1.dynamics);
  if (multis.empty()) {
    result.params = result.phase1_params;
    return result;
  }
  TrainConfig phase2_config = config;
  phase2_config.seed = derive_seed(config.seed, "phase2");
  TrainResult phase2 = train(result.phase1_params, multis, phase2_config,
                             config.epochs_phase2, LossKind::Kl);
  result.params = std::move(phase2.params);
  return result;
}

std::vector<FeatureRow> load_features(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  std::vector<FeatureRow> rows;
  std::string line;
  std::size_t lineno = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    FeatureRow row;
    std::stringstream ss(line);
    std::string field;
    if (!std::getline(ss, field, ',') || field.empty())
      throw InputError(path + ":" + std::to_string(lineno) + ": missing uid");
    row.uid = field;
    while (std::getline(ss, field, ',')) {
      try {
        std::size_t pos = 0;
        const double v = std::stod(field, &pos);
        if (pos != field.size() || !std::isfinite(v)) throw std::invalid_argument(field);
        row.x.push_back(v);
      } catch (const std::exception&) {
        throw InputError(path + ":" + std::to_string(lineno) +
                         ": bad feature value '" + field + "'");
      }
    }
    if (row.x.empty())
      throw InputError(path + ":" + std::to_string(lineno) + ": no feature values");
    if (dim == 0) {
      dim = row.x.size();
    } else if (row.x.size() != dim) {
      throw InputError(path + ":" + std::to_string(lineno) +
                       ": inconsistent feature dimension");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void save_features(const std::string& path, const std::vector<FeatureRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write file: " + path);
  for (const FeatureRow& row : rows) {
    out << row.uid;
    for (double v : row.x) out << ',' << format_double(v);
    out << '\n';
  }
}

void save_model(const std::string& path, const ClassifierParams& params,
                std::uint64_t seed, std::uint64_t config_hash) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write file: " + path);
  out << "labeldist-model 1\n";
  out << "dim " << params.dim << "\n";
  out << "classes " << kNumLabels << "\n";
  out << "seed " << seed << "\n";
  out << "config_hash " << config_hash << "\n";
  for (int k = 0; k < kNumLabels; ++k) {
    out << "w";
    for (int j = 0; j < params.dim; ++j) out << ' ' << format_double(params.w(k, j));
    out << '\n';
  }
  out << "b";
  for (int k = 0; k < kNumLabels; ++k) out << ' ' << format_double(params.bias[k]);
  out << '\n';
}

LoadedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "labeldist-model")
    throw InputError(path + ": not a labeldist model file");
  if (version != 1)
    throw InputError(path + ": unsupported model version " + std::to_string(version));

  LoadedModel model;
  std::string key;
  int classes = 0;
  if (!(in >> key >> model.params.dim) || key != "dim" || model.params.dim < 1)
    throw InputError(path + ": bad dim header");
  if (!(in >> key >> classes) || key != "classes" || classes != kNumLabels)
    throw InputError(path + ": bad classes header");
  if (!(in >> key >> model.seed) || key != "seed")
    throw InputError(path + ": bad seed header");
  if (!(in >> key >> model.config_hash) || key != "config_hash")
    throw InputError(path + ": bad config_hash header");

  model.params.weights.resize(static_cast<std::size_t>(kNumLabels) * model.params.dim);
  for (int k = 0; k < kNumLabels; ++k) {
    if (!(in >> key) || key != "w") throw InputError(path + ": bad weight row");
    for (int j = 0; j < model.params.dim; ++j) {
      if (!(in >> model.params.weights[static_cast<std::size_t>(k) * model.params.dim + j]))
        throw InputError(path + ": truncated weight row");
    }
  }
  if (!(in >> key) || key != "b") throw InputError(path + ": bad bias row");
  for (int k = 0; k < kNumLabels; ++k) {
    if (!(in >> model.params.bias[k])) throw InputError(path + ": truncated bias row");
  }
  return model;
}

}  // namespace labeldist
