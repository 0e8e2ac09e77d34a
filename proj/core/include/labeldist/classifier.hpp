#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "labeldist/labels.hpp"

namespace labeldist {

enum class LossKind { CrossEntropy, Kl };
enum class Optimizer { Sgd, Adam };

// Linear softmax classifier over externally supplied feature vectors:
// logits = W x + b with W of shape 3 x dim.
struct ClassifierParams {
  int dim = 0;
  std::vector<double> weights;  // row-major, kNumLabels * dim
  std::array<double, kNumLabels> bias{};

  double& w(int row, int col) { return weights[static_cast<std::size_t>(row) * dim + col]; }
  double w(int row, int col) const { return weights[static_cast<std::size_t>(row) * dim + col]; }
};

struct TrainConfig {
  // Desk-scale default; 1e-5 is the right order for finetuning a large
  // pretrained encoder, not a fresh linear head.
  double learning_rate = 1e-2;
  int batch_size = 128;
  int epochs_phase1 = 3;
  int epochs_phase2 = 9;
  LossKind loss = LossKind::CrossEntropy;
  Optimizer optimizer = Optimizer::Sgd;
  std::uint64_t seed = 0;
};

std::uint64_t train_config_hash(const TrainConfig& config);

struct TrainExample {
  std::vector<double> x;
  LabelDistribution target;
};

struct Gradient {
  std::vector<double> weights;
  std::array<double, kNumLabels> bias{};
};

// Per-example gold-label confidence statistics across training epochs
// (the training-dynamics signal behind hard-to-learn selection).
struct DynamicsRow {
  double mean_gold_prob = 0.0;
  double std_gold_prob = 0.0;
};

struct TrainResult {
  ClassifierParams params;
  std::vector<DynamicsRow> dynamics;   // one row per training example
  std::vector<double> epoch_losses;    // full-data loss before training and
                                       // after each epoch (epochs + 1 values)
};

// Seeded small-variance weight initialization, zero bias.
ClassifierParams init_params(int dim, std::uint64_t seed);

std::array<double, kNumLabels> forward(const ClassifierParams& params,
                                       std::span<const double> x);

// Mean loss and gradient over the batch. CE = -sum t_i log softmax_i;
// KL = sum t_i log(t_i / softmax_i) = CE minus the target entropy, so
// both produce the same gradient (softmax - t) outer x.
std::pair<double, Gradient> loss_and_grad(const ClassifierParams& params,
                                          std::span<const TrainExample> batch,
                                          LossKind loss);

// Minibatch gradient descent with per-epoch seeded shuffling. Fully
// deterministic: (params, data, config, epochs) fixes the result.
TrainResult train(const ClassifierParams& params,
                  std::span<const TrainExample> dataset,
                  const TrainConfig& config, int epochs, LossKind loss);

struct TwoPhaseResult {
  ClassifierParams params;         // after both phases
  ClassifierParams phase1_params;  // snapshot after phase 1
  std::vector<DynamicsRow> phase1_dynamics;
};

// Phase 1: cross entropy on the one-hot single-annotation targets for
// epochs_phase1. Phase 2: KL on the soft multi-annotation targets for
// epochs_phase2 (skipped when multis is empty). Phase 2 reuses the
// phase-1 learning rate.
TwoPhaseResult two_phase_train(std::span<const TrainExample> singles,
                               std::span<const TrainExample> multis,
                               const TrainConfig& config);

// Feature file: one line per example, uid followed by dim
// comma-separated reals.
struct FeatureRow {
  std::string uid;
  std::vector<double> x;
};
std::vector<FeatureRow> load_features(const std::string& path);
void save_features(const std::string& path, const std::vector<FeatureRow>& rows);

// Versioned text checkpoint with a (dim, classes, seed, config hash)
// header; weights round-trip exactly.
void save_model(const std::string& path, const ClassifierParams& params,
                std::uint64_t seed, std::uint64_t config_hash);
struct LoadedModel {
  ClassifierParams params;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
};
LoadedModel load_model(const std::string& path);

}  // namespace labeldist
