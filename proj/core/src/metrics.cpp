#include "labeldist/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "labeldist/errors.hpp"
#include "labeldist/rng.hpp"

namespace labeldist {

namespace {

const double kLn3 = std::log(3.0);

double apply_base(double nats, LogBase base) {
  return base == LogBase::Nat ? nats : nats / std::numbers::ln2;
}

// Kahan accumulator; keeps reductions deterministic to ~1e-12 even if a
// caller later parallelizes per-example terms and sums partials.
class CompensatedSum {
 public:
  void add(double v) {
    const double y = v - c_;
    const double t = sum_ + y;
    c_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

}  // namespace

double entropy(const LabelDistribution& dist, LogBase base) {
  validate_distribution(dist, "entropy");
  double h = 0.0;
  for (int i = 0; i < kNumLabels; ++i) {
    if (dist[i] > 0.0) h -= dist[i] * std::log(dist[i]);
  }
  return apply_base(h, base);
}

double kl_div(const LabelDistribution& p, const LabelDistribution& q, double eps,
              LogBase base) {
  validate_distribution(p, "kl_div p");
  validate_distribution(q, "kl_div q");
  if (!(eps > 0.0)) throw InputError("kl_div: eps must be positive");
  double kl = 0.0;
  for (int i = 0; i < kNumLabels; ++i) {
    if (p[i] > 0.0) kl += p[i] * std::log(p[i] / std::max(q[i], eps));
  }
  return apply_base(kl, base);
}

double jsd(const LabelDistribution& p, const LabelDistribution& q, LogBase base) {
  validate_distribution(p, "jsd p");
  validate_distribution(q, "jsd q");
  // m dominates both sides wherever they have mass, so no clamp is
  // needed inside the two KL terms.
  double kl_pm = 0.0;
  double kl_qm = 0.0;
  for (int i = 0; i < kNumLabels; ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) kl_pm += p[i] * std::log(p[i] / m);
    if (q[i] > 0.0) kl_qm += q[i] * std::log(q[i] / m);
  }
  const double js = apply_base(0.5 * (kl_pm + kl_qm), base);
  return std::sqrt(std::max(0.0, js));
}

double min_extreme_prob(const std::vector<LabelDistribution>& dists) {
  if (dists.empty()) throw InputError("min_extreme_prob: empty input");
  CompensatedSum sum;
  for (const auto& d : dists) {
    validate_distribution(d, "min_extreme_prob");
    sum.add(std::min(d[Label::Entailment], d[Label::Contradiction]));
  }
  return sum.value() / static_cast<double>(dists.size());
}

std::pair<double, double> accuracies(const std::vector<ScoredPair>& pairs) {
  if (pairs.empty()) throw InputError("accuracies: empty input");
  std::int64_t hits_old = 0;
  std::int64_t hits_new = 0;
  for (const ScoredPair& pair : pairs) {
    const Label predicted = argmax_label(pair.pred);
    if (predicted == pair.old_label) ++hits_old;
    if (predicted == argmax_label(pair.human)) ++hits_new;
  }
  const double n = static_cast<double>(pairs.size());
  return {static_cast<double>(hits_old) / n, static_cast<double>(hits_new) / n};
}

MetricsReport score_pairs(const std::vector<ScoredPair>& pairs, double eps) {
  if (pairs.empty()) throw InputError("score_pairs: empty input");
  CompensatedSum jsd_sum, kl_sum, entropy_sum, extreme_sum;
  for (const ScoredPair& pair : pairs) {
    validate_distribution(pair.human, "score_pairs human " + pair.uid);
    validate_distribution(pair.pred, "score_pairs pred " + pair.uid);
    jsd_sum.add(jsd(pair.human, pair.pred));
    kl_sum.add(kl_div(pair.human, pair.pred, eps));
    entropy_sum.add(entropy(pair.pred));
    extreme_sum.add(std::min(pair.pred[Label::Entailment],
                             pair.pred[Label::Contradiction]));
  }
  MetricsReport report;
  const double n = static_cast<double>(pairs.size());
  report.n_examples = static_cast<std::int64_t>(pairs.size());
  report.jsd = jsd_sum.value() / n;
  report.kl = kl_sum.value() / n;
  report.mean_entropy = entropy_sum.value() / n;
  report.min_extreme_prob = extreme_sum.value() / n;
  std::tie(report.acc_old, report.acc_new) = accuracies(pairs);
  return report;
}

EntropyHistogram entropy_histogram(const std::vector<LabelDistribution>& dists,
                                   int n_bins) {
  if (n_bins < 1) throw InputError("entropy_histogram: n_bins must be >= 1");
  EntropyHistogram hist;
  hist.edges.resize(static_cast<std::size_t>(n_bins) + 1);
  for (int b = 0; b <= n_bins; ++b) {
    hist.edges[b] = kLn3 * static_cast<double>(b) / static_cast<double>(n_bins);
  }
  hist.counts.assign(static_cast<std::size_t>(n_bins), 0);
  for (const auto& d : dists) {
    // Entropy of a valid 3-way distribution cannot exceed ln 3; clamp
    // stray float excess into the final (closed) bin.
    const double h = std::min(entropy(d), kLn3);
    int bin = static_cast<int>(h / kLn3 * n_bins);
    bin = std::clamp(bin, 0, n_bins - 1);
    ++hist.counts[bin];
  }
  return hist;
}

BinnedJsd binned_jsd(const std::vector<ScoredPair>& pairs, int n_bins) {
  if (n_bins < 1) throw InputError("binned_jsd: n_bins must be >= 1");
  BinnedJsd out;
  out.edges.resize(static_cast<std::size_t>(n_bins) + 1);
  for (int b = 0; b <= n_bins; ++b) {
    out.edges[b] = kLn3 * static_cast<double>(b) / static_cast<double>(n_bins);
  }
  out.counts.assign(static_cast<std::size_t>(n_bins), 0);
  std::vector<CompensatedSum> sums(static_cast<std::size_t>(n_bins));
  for (const ScoredPair& pair : pairs) {
    const double h = std::min(entropy(pair.human), kLn3);
    int bin = static_cast<int>(h / kLn3 * n_bins);
    bin = std::clamp(bin, 0, n_bins - 1);
    ++out.counts[bin];
    sums[bin].add(jsd(pair.human, pair.pred));
  }
  out.mean_jsd.assign(static_cast<std::size_t>(n_bins), std::nullopt);
  for (int b = 0; b < n_bins; ++b) {
    if (out.counts[b] > 0) {
      out.mean_jsd[b] = sums[b].value() / static_cast<double>(out.counts[b]);
    }
  }
  return out;
}

std::vector<ScoredPair> build_scored_pairs(
    const std::vector<PredictionRecord>& predictions,
    const std::vector<AnnotationRecord>& records,
    const std::optional<CalibrationMethod>& calibration) {
  std::unordered_map<std::string, const PredictionRecord*> by_uid;
  by_uid.reserve(predictions.size());
  for (const PredictionRecord& pred : predictions) {
    if (!by_uid.emplace(pred.uid, &pred).second)
      throw InputError("duplicate prediction uid '" + pred.uid + "'");
  }
  const CalibrationMethod method =
      calibration.value_or(CalibrationMethod::none());

  std::vector<ScoredPair> pairs;
  pairs.reserve(records.size());
  for (const AnnotationRecord& rec : records) {
    auto it = by_uid.find(rec.uid);
    if (it == by_uid.end())
      throw InputError("no prediction for uid '" + rec.uid + "'");
    ScoredPair pair;
    pair.uid = rec.uid;
    pair.human = to_distribution(rec.counts);
    pair.old_label = rec.old_label;
    pair.pred = apply_post_hoc(method, it->second->logits);
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

MetricsReport evaluate(const std::vector<PredictionRecord>& predictions,
                       const std::vector<AnnotationRecord>& records,
                       const std::optional<CalibrationMethod>& calibration) {
  return score_pairs(build_scored_pairs(predictions, records, calibration));
}

MetricsReport estimate_human_baseline(const std::vector<AnnotationRecord>& records,
                                      int n_resamples, std::uint64_t seed) {
  if (records.empty()) throw InputError("estimate_human_baseline: no records");
  if (n_resamples < 1)
    throw InputError("estimate_human_baseline: n_resamples must be >= 1");
  for (const AnnotationRecord& rec : records) {
    if (rec.counts.total() < 2)
      throw InputError("estimate_human_baseline: record '" + rec.uid +
                       "' has fewer than 2 annotations");
  }

  MetricsReport mean;
  for (int r = 0; r < n_resamples; ++r) {
    std::vector<ScoredPair> pairs;
    pairs.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
      const AnnotationRecord& rec = records[i];
      const std::int64_t total = rec.counts.total();
      const std::int64_t half_a = total / 2;  // 100 -> 50/50, 2 -> 1/1

      std::vector<std::uint8_t> votes;
      votes.reserve(static_cast<std::size_t>(total));
      for (int l = 0; l < kNumLabels; ++l) {
        votes.insert(votes.end(), static_cast<std::size_t>(rec.counts[l]),
                     static_cast<std::uint8_t>(l));
      }
      Rng rng(derive_seed(seed, "human-baseline",
                          static_cast<std::uint64_t>(r) * records.size() + i));
      rng.shuffle(votes);

      LabelCounts counts_a, counts_b;
      for (std::int64_t v = 0; v < total; ++v) {
        ++(v < half_a ? counts_a : counts_b)[votes[static_cast<std::size_t>(v)]];
      }
      ScoredPair pair;
      pair.uid = rec.uid;
      pair.pred = to_distribution(counts_a);
      pair.human = to_distribution(counts_b);
      pair.old_label = rec.old_label;
      pairs.push_back(std::move(pair));
    }
    const MetricsReport rep = score_pairs(pairs);
    mean.jsd += rep.jsd;
    mean.kl += rep.kl;
    mean.acc_old += rep.acc_old;
    mean.acc_new += rep.acc_new;
    mean.mean_entropy += rep.mean_entropy;
    mean.min_extreme_prob += rep.min_extreme_prob;
  }
  const double n = static_cast<double>(n_resamples);
  mean.jsd /= n;
  mean.kl /= n;
  mean.acc_old /= n;
  mean.acc_new /= n;
  mean.mean_entropy /= n;
  mean.min_extreme_prob /= n;
  mean.n_examples = static_cast<std::int64_t>(records.size());
  return mean;
}

}  // namespace labeldist
