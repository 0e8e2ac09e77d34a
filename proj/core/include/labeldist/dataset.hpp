#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "labeldist/labels.hpp"

namespace labeldist {

// One multi-annotated example: the fresh per-annotator tallies plus the
// original dataset's aggregated gold label. Premise/hypothesis text is
// carried opaquely and never interpreted.
struct AnnotationRecord {
  std::string uid;
  LabelCounts counts;
  Label old_label = Label::Entailment;
  std::optional<std::string> premise;
  std::optional<std::string> hypothesis;
};

struct PredictionRecord {
  std::string uid;
  std::array<double, kNumLabels> logits{};
};

struct DatasetSplit {
  std::vector<AnnotationRecord> train;
  std::vector<AnnotationRecord> eval;
  std::uint64_t seed = 0;
};

// Annotation file: newline-delimited JSON, one record per line with keys
// `uid`, `label_counter` ({"e":int,"n":int,"c":int}), `old_label`
// ("e"/"n"/"c"), optional `premise`/`hypothesis`. Errors report the
// offending line number.
std::vector<AnnotationRecord> load_annotations(const std::string& path);
void save_annotations(const std::string& path,
                      const std::vector<AnnotationRecord>& records);

// Prediction file: one JSON record per line with keys `uid` and `logits`
// (array of 3 finite numbers in canonical label order).
std::vector<PredictionRecord> load_predictions(const std::string& path);
void save_predictions(const std::string& path,
                      const std::vector<PredictionRecord>& records);

// Empirical frequencies count_i / total. Requires total > 0.
LabelDistribution to_distribution(const LabelCounts& counts);

// Label with the maximal count; ties go to the lowest canonical index.
Label majority_label(const LabelCounts& counts);

// Seeded uniform split: `n_eval` records go to eval, the rest to train.
// Input order is preserved within each side.
DatasetSplit repartition(const std::vector<AnnotationRecord>& records,
                         std::size_t n_eval, std::uint64_t seed);

// Draw k of the individual votes without replacement. 1 <= k <= total.
LabelCounts subsample_annotations(const LabelCounts& counts, std::int64_t k,
                                  std::uint64_t seed);

}  // namespace labeldist
