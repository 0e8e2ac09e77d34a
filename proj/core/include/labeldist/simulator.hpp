#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "labeldist/classifier.hpp"
#include "labeldist/dataset.hpp"
#include "labeldist/labels.hpp"

namespace labeldist {

// Allocation of a fixed annotation budget: n_single examples labeled
// once plus n_multi examples labeled k_way times, with
// n_single + n_multi * k_way == budget exactly.
struct BudgetPlan {
  std::int64_t budget = 0;
  std::int64_t n_single = 0;
  std::int64_t n_multi = 0;
  std::int64_t k_way = 0;  // >= 2 whenever n_multi > 0
};

// Throws InputError (stating both sides of the identity) when the plan
// does not conserve the budget.
void validate_plan(const BudgetPlan& plan);

enum class SelectionStrategy { Random, MostAmbiguous, MostEasy, MostHard };

SelectionStrategy selection_strategy_from_name(const std::string& name);
std::string selection_strategy_name(SelectionStrategy strategy);

// Which label a single-annotated example contributes at training time:
// one vote sampled from its annotation pool (default), or the original
// aggregated gold label.
enum class SingleVoteMode { SampledVote, OldGold };

struct SingleExample {
  std::string uid;
  Label vote = Label::Entailment;
};

struct MultiExample {
  std::string uid;
  LabelCounts counts;  // totals k_way
};

struct TrainingSets {
  std::vector<SingleExample> singles;
  std::vector<MultiExample> multis;
};

// Materializes a plan: n_single examples drawn from single_pool with one
// vote each, n_multi examples drawn from multi_pool with k_way votes
// subsampled from their pools. Choices are disjoint within each pool and
// deterministic per seed.
TrainingSets build_training_sets(const std::vector<AnnotationRecord>& single_pool,
                                 const std::vector<AnnotationRecord>& multi_pool,
                                 const BudgetPlan& plan, std::uint64_t seed,
                                 SingleVoteMode vote_mode = SingleVoteMode::SampledVote);

// Picks n_select examples from the pool. Random is a seeded uniform
// subset; MostAmbiguous / MostEasy rank by human label entropy
// (descending / ascending); MostHard ranks by mean gold-label confidence
// across training epochs, ascending, and requires `hardness` scores for
// every pool uid. Ties break by uid order.
std::vector<AnnotationRecord> select_examples(
    const std::vector<AnnotationRecord>& pool, std::size_t n_select,
    SelectionStrategy strategy, std::uint64_t seed,
    const std::unordered_map<std::string, double>* hardness = nullptr);

// Synthetic world: features drawn from a 3-class Gaussian mixture whose
// equal-norm class means double as the true weight rows, so the true
// label distribution softmax(means * x / tau_gen) is exactly realizable
// by the linear classifier.
struct SyntheticWorldConfig {
  std::int64_t n_examples = 0;
  int dim = 8;
  double tau_gen = 1.0;       // ambiguity temperature, > 0
  std::int64_t votes = 100;   // annotations per example, >= 1
  double mean_scale = 2.0;    // norm of each class mean
  double feature_noise = 1.0; // within-class feature standard deviation
  int old_label_votes = 5;    // independent votes aggregated into old_label
  std::uint64_t seed = 0;
};

struct SyntheticWorld {
  std::vector<FeatureRow> features;
  std::vector<LabelDistribution> true_dists;
  std::vector<AnnotationRecord> records;
  std::vector<double> true_weights;  // row-major, kNumLabels * dim
};

SyntheticWorld generate_synthetic(const SyntheticWorldConfig& config);

}  // namespace labeldist
