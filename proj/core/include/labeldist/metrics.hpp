#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "labeldist/calibration.hpp"
#include "labeldist/dataset.hpp"
#include "labeldist/labels.hpp"

namespace labeldist {

inline constexpr double kDefaultKlEpsilon = 1e-12;
inline constexpr int kDefaultBins = 10;

// Log base for entropy and KL. Defaults are frozen: natural log for
// entropy/KL, and JSD is reported as the base-2 square-root distance
// (symmetric, bounded by 1).
enum class LogBase { Nat, Base2 };

// -sum p_i log p_i, with 0 * log 0 == 0.
double entropy(const LabelDistribution& dist, LogBase base = LogBase::Nat);

// KL(p || q) = sum over i with p_i > 0 of p_i log(p_i / max(q_i, eps)).
// Direction is human || model: the human side may carry structural
// zeros, the model side gets the epsilon clamp.
double kl_div(const LabelDistribution& p, const LabelDistribution& q,
              double eps = kDefaultKlEpsilon, LogBase base = LogBase::Nat);

// Jensen-Shannon distance: sqrt((KL(p||m) + KL(q||m)) / 2), m = (p+q)/2.
// Base-2 by default, which bounds the value by 1.
double jsd(const LabelDistribution& p, const LabelDistribution& q,
           LogBase base = LogBase::Base2);

// Mean over examples of min(p_entailment, p_contradiction): how much
// mass the distributions put on both extreme labels at once.
double min_extreme_prob(const std::vector<LabelDistribution>& dists);

struct MetricsReport {
  double jsd = 0.0;
  double kl = 0.0;
  double acc_old = 0.0;
  double acc_new = 0.0;
  double mean_entropy = 0.0;  // of the prediction side
  std::int64_t n_examples = 0;
  double min_extreme_prob = 0.0;  // of the prediction side
};

// One evaluation pair, already reduced to distributions. `human` is the
// reference side, `pred` the scored side.
struct ScoredPair {
  std::string uid;
  LabelDistribution human;
  Label old_label = Label::Entailment;
  LabelDistribution pred;
};

// Aggregates all report fields over the pairs. Accumulation runs in
// input order with compensated (Kahan) summation so that reports are
// stable to within 1e-12 regardless of how callers batch the work.
MetricsReport score_pairs(const std::vector<ScoredPair>& pairs,
                          double eps = kDefaultKlEpsilon);

// (acc_old, acc_new): fraction of pairs whose prediction argmax matches
// the original gold label / the majority of the new annotations. The
// argmax tie-break is the shared lowest-index rule.
std::pair<double, double> accuracies(const std::vector<ScoredPair>& pairs);

struct EntropyHistogram {
  std::vector<double> edges;        // n_bins + 1, over [0, ln 3]
  std::vector<std::int64_t> counts; // n_bins, sums to the input size
};

// Equal-width bins over [0, ln 3]; bins are right-open except the last,
// which is closed.
EntropyHistogram entropy_histogram(const std::vector<LabelDistribution>& dists,
                                   int n_bins = kDefaultBins);

struct BinnedJsd {
  std::vector<double> edges;            // n_bins + 1, human-entropy axis
  std::vector<std::int64_t> counts;     // examples per bin
  std::vector<std::optional<double>> mean_jsd;  // empty bins stay nullopt
};

// Mean human-vs-prediction JSD per human-label-entropy bin.
BinnedJsd binned_jsd(const std::vector<ScoredPair>& pairs, int n_bins = kDefaultBins);

// Full evaluation: match predictions to records by uid (every record
// needs a prediction; extra predictions are ignored), apply the optional
// post-hoc calibration, and score. Throws InputError on a missing uid.
MetricsReport evaluate(const std::vector<PredictionRecord>& predictions,
                       const std::vector<AnnotationRecord>& records,
                       const std::optional<CalibrationMethod>& calibration = {});

// The matched, calibrated pairs behind evaluate(), for callers that also
// want histograms or binned tables.
std::vector<ScoredPair> build_scored_pairs(
    const std::vector<PredictionRecord>& predictions,
    const std::vector<AnnotationRecord>& records,
    const std::optional<CalibrationMethod>& calibration = {});

// Annotation-split bootstrap of annotator self-agreement: per resample,
// each record's votes are split into two random halves and half A is
// scored as if it were a prediction of half B; reports are averaged over
// resamples. Every record needs at least 2 votes.
MetricsReport estimate_human_baseline(const std::vector<AnnotationRecord>& records,
                                      int n_resamples, std::uint64_t seed);

}  // namespace labeldist
