#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <vector>

#include "labeldist/calibration.hpp"
#include "labeldist/classifier.hpp"
#include "labeldist/errors.hpp"
#include "labeldist/metrics.hpp"
#include "labeldist/rng.hpp"
#include "labeldist/simulator.hpp"

using namespace labeldist;

namespace {

std::string test_dir() {
  static const std::string dir = [] {
    auto d = std::filesystem::temp_directory_path() / "labeldist-test-classifier";
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d.string();
  }();
  return dir;
}

std::vector<TrainExample> random_batch(int n, int dim, std::uint64_t seed,
                                       bool soft_targets) {
  Rng rng(seed);
  std::vector<TrainExample> batch(static_cast<std::size_t>(n));
  for (auto& ex : batch) {
    ex.x.resize(static_cast<std::size_t>(dim));
    for (auto& v : ex.x) v = rng.normal();
    if (soft_targets) {
      double total = 0.0;
      for (int c = 0; c < kNumLabels; ++c) {
        ex.target[static_cast<std::size_t>(c)] = -std::log(1.0 - rng.uniform01());
        total += ex.target[static_cast<std::size_t>(c)];
      }
      for (int c = 0; c < kNumLabels; ++c) ex.target[static_cast<std::size_t>(c)] /= total;
    } else {
      ex.target = one_hot(static_cast<Label>(rng.below(3)));
    }
  }
  return batch;
}

ClassifierParams random_params(int dim, std::uint64_t seed) {
  Rng rng(seed);
  ClassifierParams params;
  params.dim = dim;
  params.weights.resize(static_cast<std::size_t>(kNumLabels * dim));
  for (auto& w : params.weights) w = rng.normal() * 0.5;
  for (auto& b : params.bias) b = rng.normal() * 0.1;
  return params;
}

bool params_equal(const ClassifierParams& a, const ClassifierParams& b) {
  return a.dim == b.dim && a.weights == b.weights && a.bias == b.bias;
}

}  // namespace

TEST_CASE("init_params is seeded and small") {
  const auto a = init_params(5, 42);
  const auto b = init_params(5, 42);
  const auto c = init_params(5, 43);
  CHECK(params_equal(a, b));
  CHECK_FALSE(params_equal(a, c));
  CHECK(a.dim == 5);
  REQUIRE(a.weights.size() == 15);
  for (const auto w : a.weights) CHECK(std::abs(w) < 1.0);
  for (const auto bias : a.bias) CHECK(bias == 0.0);
  CHECK_THROWS_AS(init_params(0, 1), InputError);
}

TEST_CASE("forward computes W x + b") {
  ClassifierParams params;
  params.dim = 2;
  params.weights = {1.0, 0.0,   // entailment row
                    0.0, 1.0,   // neutral row
                    1.0, 1.0};  // contradiction row
  params.bias = {0.5, 0.0, -1.0};
  const std::vector<double> x = {2.0, 3.0};
  const auto logits = forward(params, x);
  CHECK(logits[0] == 2.5);
  CHECK(logits[1] == 3.0);
  CHECK(logits[2] == 4.0);
}

TEST_CASE("analytic gradients match central finite differences") {
  const int dim = 4;
  const double fd_h = 1e-6;
  int checked = 0;
  for (std::uint64_t fixture = 0; fixture < 100; ++fixture) {
    const auto loss_kind = (fixture % 2 == 0) ? LossKind::CrossEntropy : LossKind::Kl;
    auto params = random_params(dim, 1000 + fixture);
    const auto batch =
        random_batch(3, dim, 2000 + fixture, loss_kind == LossKind::Kl);
    const auto [loss, grad] = loss_and_grad(params, batch, loss_kind);
    CHECK(std::isfinite(loss));

    auto loss_at = [&](ClassifierParams& p) {
      return loss_and_grad(p, batch, loss_kind).first;
    };

    double max_rel = 0.0;
    auto probe = [&](double& slot, double analytic) {
      const double keep = slot;
      slot = keep + fd_h;
      const double up = loss_at(params);
      slot = keep - fd_h;
      const double down = loss_at(params);
      slot = keep;
      const double numeric = (up - down) / (2.0 * fd_h);
      const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      max_rel = std::max(max_rel, std::abs(analytic - numeric) / scale);
    };
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
      probe(params.weights[i], grad.weights[i]);
    }
    for (std::size_t i = 0; i < params.bias.size(); ++i) {
      probe(params.bias[i], grad.bias[static_cast<std::size_t>(i)]);
    }
    CHECK(max_rel <= 1e-5);
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("kl loss equals ce loss minus target entropy") {
  const int dim = 4;
  for (std::uint64_t fixture = 0; fixture < 20; ++fixture) {
    const auto params = random_params(dim, 3000 + fixture);
    const auto batch = random_batch(5, dim, 4000 + fixture, true);
    const double ce = loss_and_grad(params, batch, LossKind::CrossEntropy).first;
    const double kl = loss_and_grad(params, batch, LossKind::Kl).first;
    double mean_target_entropy = 0.0;
    for (const auto& ex : batch) mean_target_entropy += entropy(ex.target);
    mean_target_entropy /= static_cast<double>(batch.size());
    CHECK(std::abs(kl - (ce - mean_target_entropy)) <= 1e-10);
  }
}

TEST_CASE("training is deterministic and reduces the loss") {
  const int dim = 6;
  const auto batch = random_batch(64, dim, 5, false);
  TrainConfig config;
  config.learning_rate = 0.1;
  config.batch_size = 16;
  config.seed = 9;

  const auto init = init_params(dim, 9);

  SUBCASE("zero epochs is a no-op with one loss entry") {
    const auto result = train(init, batch, config, 0, LossKind::CrossEntropy);
    CHECK(params_equal(result.params, init));
    REQUIRE(result.epoch_losses.size() == 1);
  }

  SUBCASE("loss decreases and reruns are bit-identical") {
    const auto a = train(init, batch, config, 8, LossKind::CrossEntropy);
    const auto b = train(init, batch, config, 8, LossKind::CrossEntropy);
    CHECK(params_equal(a.params, b.params));
    REQUIRE(a.epoch_losses.size() == 9);
    CHECK(a.epoch_losses.back() < a.epoch_losses.front());
    CHECK(a.epoch_losses == b.epoch_losses);
    REQUIRE(a.dynamics.size() == batch.size());
    for (const auto& row : a.dynamics) {
      CHECK(row.mean_gold_prob >= 0.0);
      CHECK(row.mean_gold_prob <= 1.0);
      CHECK(row.std_gold_prob >= 0.0);
    }
  }

  SUBCASE("adam also reduces the loss") {
    TrainConfig adam = config;
    adam.optimizer = Optimizer::Adam;
    adam.learning_rate = 0.05;
    const auto result = train(init, batch, adam, 8, LossKind::CrossEntropy);
    CHECK(result.epoch_losses.back() < result.epoch_losses.front());
  }

  SUBCASE("dimension mismatch is rejected") {
    const auto bad = random_batch(4, dim + 1, 6, false);
    CHECK_THROWS_AS(train(init, bad, config, 1, LossKind::CrossEntropy), InputError);
  }
}

TEST_CASE("two-phase training equals phase 1 when no multis exist") {
  const int dim = 5;
  const auto singles = random_batch(48, dim, 15, false);
  TrainConfig config;
  config.learning_rate = 0.1;
  config.batch_size = 16;
  config.epochs_phase1 = 4;
  config.epochs_phase2 = 6;
  config.seed = 77;

  const auto two = two_phase_train(singles, {}, config);
  const auto one = train(init_params(dim, config.seed), singles, config,
                         config.epochs_phase1, LossKind::CrossEntropy);
  CHECK(params_equal(two.params, one.params));
  CHECK(params_equal(two.phase1_params, one.params));
  REQUIRE(two.phase1_dynamics.size() == singles.size());
}

TEST_CASE("phase 2 pulls prediction entropy toward the soft targets") {
  // World with ambiguous truth: one-hot phase-1 training lands sharper
  // than the truth, and KL finetuning on soft targets recovers entropy.
  SyntheticWorldConfig world_config;
  world_config.n_examples = 500;
  world_config.dim = 6;
  world_config.tau_gen = 2.5;
  world_config.votes = 50;
  world_config.seed = 61;
  const auto world = generate_synthetic(world_config);

  std::vector<TrainExample> singles(world.records.size());
  std::vector<TrainExample> multis(world.records.size());
  for (std::size_t i = 0; i < world.records.size(); ++i) {
    singles[i].x = world.features[i].x;
    singles[i].target = one_hot(world.records[i].old_label);
    multis[i].x = world.features[i].x;
    multis[i].target = to_distribution(world.records[i].counts);
  }

  TrainConfig config;
  config.learning_rate = 0.2;
  config.batch_size = 32;
  config.epochs_phase1 = 12;
  config.epochs_phase2 = 8;
  config.seed = 5;

  const auto result = two_phase_train(singles, multis, config);

  double true_h = 0.0, phase1_h = 0.0, final_h = 0.0;
  for (std::size_t i = 0; i < world.records.size(); ++i) {
    true_h += entropy(world.true_dists[i]);
    phase1_h += entropy(softmax(forward(result.phase1_params, world.features[i].x)));
    final_h += entropy(softmax(forward(result.params, world.features[i].x)));
  }
  const auto n = static_cast<double>(world.records.size());
  true_h /= n;
  phase1_h /= n;
  final_h /= n;

  CHECK(phase1_h < true_h);  // gold-label training overcommits
  CHECK(std::abs(final_h - true_h) < std::abs(phase1_h - true_h));
}

TEST_CASE("model checkpoints round-trip exactly") {
  const auto params = random_params(7, 81);
  const std::string path = test_dir() + "/model.txt";
  save_model(path, params, 4321, 999888777);
  const auto loaded = load_model(path);
  CHECK(params_equal(loaded.params, params));
  CHECK(loaded.seed == 4321);
  CHECK(loaded.config_hash == 999888777);

  CHECK_THROWS_AS(load_model(test_dir() + "/missing.txt"), InputError);
}

TEST_CASE("feature files round-trip exactly") {
  std::vector<FeatureRow> rows(2);
  rows[0].uid = "f1";
  rows[0].x = {0.1234567890123456, -2.0, 1e-9};
  rows[1].uid = "f2";
  rows[1].x = {3.0, 4.5, -0.000125};
  const std::string path = test_dir() + "/features.csv";
  save_features(path, rows);
  const auto loaded = load_features(path);
  REQUIRE(loaded.size() == 2);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(loaded[i].uid == rows[i].uid);
    CHECK(loaded[i].x == rows[i].x);  // exact: %.17g print, full read-back
  }
  CHECK_THROWS_AS(load_features(test_dir() + "/missing.csv"), InputError);
}

TEST_CASE("train_config_hash separates configs") {
  TrainConfig a;
  TrainConfig b;
  CHECK(train_config_hash(a) == train_config_hash(b));
  b.learning_rate = 0.5;
  CHECK(train_config_hash(a) != train_config_hash(b));
  b = a;
  b.loss = LossKind::Kl;
  CHECK(train_config_hash(a) != train_config_hash(b));
  b = a;
  b.batch_size = 64;
  CHECK(train_config_hash(a) != train_config_hash(b));
}
