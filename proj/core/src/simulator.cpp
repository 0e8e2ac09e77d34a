#include "labeldist/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "labeldist/calibration.hpp"
#include "labeldist/errors.hpp"
#include "labeldist/metrics.hpp"
#include "labeldist/rng.hpp"

namespace labeldist {

namespace {

std::string plan_to_string(const BudgetPlan& plan) {
  return "budget=" + std::to_string(plan.budget) +
         " n_single=" + std::to_string(plan.n_single) +
         " n_multi=" + std::to_string(plan.n_multi) +
         " k_way=" + std::to_string(plan.k_way);
}

// Draws one label from a distribution by inverse-CDF walk. The final
// index absorbs any floating-point shortfall in the cumulative sum.
Label draw_label(Rng& rng, const LabelDistribution& dist) {
  const double u = rng.uniform01();
  double cum = 0.0;
  for (int i = 0; i + 1 < kNumLabels; ++i) {
    cum += dist[i];
    if (u < cum) return static_cast<Label>(i);
  }
  return static_cast<Label>(kNumLabels - 1);
}

// Draws one vote uniformly from the record's vote multiset.
Label draw_vote(Rng& rng, const LabelCounts& counts) {
  const std::int64_t total = counts.total();
  std::int64_t pick = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(total)));
  for (int i = 0; i < kNumLabels; ++i) {
    if (pick < counts[i]) return static_cast<Label>(i);
    pick -= counts[i];
  }
  return static_cast<Label>(kNumLabels - 1);  // unreachable for valid counts
}

// First `k` positions of a seeded permutation of {0, ..., n-1}.
std::vector<std::size_t> draw_indices(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace

void validate_plan(const BudgetPlan& plan) {
  if (plan.budget < 0 || plan.n_single < 0 || plan.n_multi < 0 || plan.k_way < 0) {
    throw InputError("budget plan has a negative component: " + plan_to_string(plan));
  }
  if (plan.n_multi > 0 && plan.k_way < 2) {
    throw InputError("budget plan needs k_way >= 2 when n_multi > 0: " +
                     plan_to_string(plan));
  }
  const std::int64_t spent = plan.n_single + plan.n_multi * plan.k_way;
  if (spent != plan.budget) {
    throw InputError(
        "budget plan does not conserve annotations: n_single + n_multi * k_way = " +
        std::to_string(plan.n_single) + " + " + std::to_string(plan.n_multi) + " * " +
        std::to_string(plan.k_way) + " = " + std::to_string(spent) +
        ", but budget = " + std::to_string(plan.budget));
  }
}

SelectionStrategy selection_strategy_from_name(const std::string& name) {
  if (name == "random") return SelectionStrategy::Random;
  if (name == "most_ambiguous") return SelectionStrategy::MostAmbiguous;
  if (name == "most_easy") return SelectionStrategy::MostEasy;
  if (name == "most_hard") return SelectionStrategy::MostHard;
  throw InputError("unknown selection strategy '" + name +
                   "' (expected random, most_ambiguous, most_easy, or most_hard)");
}

std::string selection_strategy_name(SelectionStrategy strategy) {
  switch (strategy) {
    case SelectionStrategy::Random: return "random";
    case SelectionStrategy::MostAmbiguous: return "most_ambiguous";
    case SelectionStrategy::MostEasy: return "most_easy";
    case SelectionStrategy::MostHard: return "most_hard";
  }
  throw std::logic_error("unhandled selection strategy");
}

TrainingSets build_training_sets(const std::vector<AnnotationRecord>& single_pool,
                                 const std::vector<AnnotationRecord>& multi_pool,
                                 const BudgetPlan& plan, std::uint64_t seed,
                                 SingleVoteMode vote_mode) {
  validate_plan(plan);
  const auto n_single = static_cast<std::size_t>(plan.n_single);
  const auto n_multi = static_cast<std::size_t>(plan.n_multi);
  if (single_pool.size() < n_single) {
    throw InputError("single pool has " + std::to_string(single_pool.size()) +
                     " examples but the plan needs n_single = " +
                     std::to_string(plan.n_single));
  }
  if (multi_pool.size() < n_multi) {
    throw InputError("multi pool has " + std::to_string(multi_pool.size()) +
                     " examples but the plan needs n_multi = " +
                     std::to_string(plan.n_multi));
  }

  TrainingSets sets;
  sets.singles.reserve(n_single);
  sets.multis.reserve(n_multi);

  {
    Rng rng(derive_seed(seed, "plan-singles"));
    auto picked = draw_indices(rng, single_pool.size(), n_single);
    std::sort(picked.begin(), picked.end());  // keep pool order
    for (std::size_t idx : picked) {
      const AnnotationRecord& rec = single_pool[idx];
      SingleExample ex;
      ex.uid = rec.uid;
      if (vote_mode == SingleVoteMode::OldGold) {
        ex.vote = rec.old_label;
      } else {
        if (rec.counts.total() <= 0) {
          throw InputError("record '" + rec.uid + "' has no votes to sample from");
        }
        Rng vote_rng(derive_seed(seed, "plan-vote", idx));
        ex.vote = draw_vote(vote_rng, rec.counts);
      }
      sets.singles.push_back(std::move(ex));
    }
  }

  {
    Rng rng(derive_seed(seed, "plan-multis"));
    auto picked = draw_indices(rng, multi_pool.size(), n_multi);
    std::sort(picked.begin(), picked.end());
    for (std::size_t idx : picked) {
      const AnnotationRecord& rec = multi_pool[idx];
      if (rec.counts.total() < plan.k_way) {
        throw InputError("record '" + rec.uid + "' has " +
                         std::to_string(rec.counts.total()) +
                         " votes, fewer than k_way = " + std::to_string(plan.k_way));
      }
      MultiExample ex;
      ex.uid = rec.uid;
      ex.counts =
          subsample_annotations(rec.counts, plan.k_way, derive_seed(seed, "plan-multi-votes", idx));
      sets.multis.push_back(std::move(ex));
    }
  }

  return sets;
}

std::vector<AnnotationRecord> select_examples(
    const std::vector<AnnotationRecord>& pool, std::size_t n_select,
    SelectionStrategy strategy, std::uint64_t seed,
    const std::unordered_map<std::string, double>* hardness) {
  if (n_select > pool.size()) {
    throw InputError("cannot select " + std::to_string(n_select) + " examples from a pool of " +
                     std::to_string(pool.size()));
  }

  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  if (strategy == SelectionStrategy::Random) {
    Rng rng(derive_seed(seed, "select-random"));
    auto picked = draw_indices(rng, pool.size(), n_select);
    std::sort(picked.begin(), picked.end());  // keep pool order
    order = std::move(picked);
  } else {
    std::vector<double> score(pool.size());
    if (strategy == SelectionStrategy::MostHard) {
      if (hardness == nullptr) {
        throw InputError("most_hard selection requires hardness scores");
      }
      for (std::size_t i = 0; i < pool.size(); ++i) {
        const auto it = hardness->find(pool[i].uid);
        if (it == hardness->end()) {
          throw InputError("no hardness score for uid '" + pool[i].uid + "'");
        }
        score[i] = it->second;  // low mean gold-label confidence = hard
      }
    } else {
      for (std::size_t i = 0; i < pool.size(); ++i) {
        score[i] = entropy(to_distribution(pool[i].counts));
      }
    }
    const bool descending = strategy == SelectionStrategy::MostAmbiguous;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (score[a] != score[b]) return descending ? score[a] > score[b] : score[a] < score[b];
      return pool[a].uid < pool[b].uid;
    });
    order.resize(n_select);
  }

  std::vector<AnnotationRecord> out;
  out.reserve(order.size());
  for (std::size_t idx : order) out.push_back(pool[idx]);
  return out;
}

SyntheticWorld generate_synthetic(const SyntheticWorldConfig& config) {
  if (config.n_examples < 1) throw InputError("synthetic world needs n_examples >= 1");
  if (config.dim < 1) throw InputError("synthetic world needs dim >= 1");
  if (!(config.tau_gen > 0.0)) throw InputError("synthetic world needs tau_gen > 0");
  if (config.votes < 1) throw InputError("synthetic world needs votes >= 1");
  if (!(config.mean_scale > 0.0)) throw InputError("synthetic world needs mean_scale > 0");
  if (config.feature_noise < 0.0) throw InputError("synthetic world needs feature_noise >= 0");
  if (config.old_label_votes < 1) throw InputError("synthetic world needs old_label_votes >= 1");

  const auto dim = static_cast<std::size_t>(config.dim);
  const auto n = static_cast<std::size_t>(config.n_examples);

  // Class means: seeded directions scaled to a common norm. Equal norms
  // keep the implied softmax posterior free of a per-class bias term, so
  // the true conditional is realizable by a bias-free linear map.
  std::vector<double> means(kNumLabels * dim, 0.0);
  {
    Rng rng(derive_seed(config.seed, "class-means"));
    for (int c = 0; c < kNumLabels; ++c) {
      double norm_sq = 0.0;
      do {
        norm_sq = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
          const double g = rng.normal();
          means[static_cast<std::size_t>(c) * dim + j] = g;
          norm_sq += g * g;
        }
      } while (norm_sq == 0.0);
      const double scale = config.mean_scale / std::sqrt(norm_sq);
      for (std::size_t j = 0; j < dim; ++j) {
        means[static_cast<std::size_t>(c) * dim + j] *= scale;
      }
    }
  }

  SyntheticWorld world;
  world.true_weights = means;
  world.features.reserve(n);
  world.true_dists.reserve(n);
  world.records.reserve(n);

  for (std::size_t i = 0; i < n; ++i) {
    // Per-example stream; draw order (class, features, votes, old-label
    // votes) is fixed and part of the reproducibility contract.
    Rng rng(derive_seed(config.seed, "example", i));
    const auto cls = static_cast<std::size_t>(rng.below(kNumLabels));

    FeatureRow row;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "syn-%06zu", i);
    row.uid = buf;
    row.x.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      row.x[j] = means[cls * dim + j] + config.feature_noise * rng.normal();
    }

    std::array<double, kNumLabels> logits{};
    for (int c = 0; c < kNumLabels; ++c) {
      double dot = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        dot += means[static_cast<std::size_t>(c) * dim + j] * row.x[j];
      }
      logits[static_cast<std::size_t>(c)] = dot / config.tau_gen;
    }
    const LabelDistribution true_dist = softmax(logits);

    AnnotationRecord rec;
    rec.uid = row.uid;
    for (std::int64_t v = 0; v < config.votes; ++v) {
      rec.counts[static_cast<int>(draw_label(rng, true_dist))] += 1;
    }
    LabelCounts old_votes;
    for (int v = 0; v < config.old_label_votes; ++v) {
      old_votes[static_cast<int>(draw_label(rng, true_dist))] += 1;
    }
    rec.old_label = majority_label(old_votes);

    world.features.push_back(std::move(row));
    world.true_dists.push_back(true_dist);
    world.records.push_back(std::move(rec));
  }

  return world;
}

}  // namespace labeldist
