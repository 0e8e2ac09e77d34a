#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "labeldist/classifier.hpp"
#include "labeldist/metrics.hpp"
#include "labeldist/simulator.hpp"

namespace labeldist {

// Flat machine-first report: one `key value` line per entry, insertion
// order preserved, doubles in fixed 6-decimal notation. Repeated runs
// with the same inputs produce byte-identical documents.
class ReportDoc {
 public:
  void add(const std::string& key, double value);
  void add_int(const std::string& key, std::int64_t value);
  void add_text(const std::string& key, const std::string& value);
  const std::string& str() const { return body_; }

 private:
  std::string body_;
};

// Appends the seven fixed metric keys in canonical order:
// jsd, kl, acc_old, acc_new, entropy, n, min_extreme_prob.
void add_metrics(ReportDoc& doc, const MetricsReport& report);

std::string format_fixed6(double value);

// Writes content verbatim (binary mode, so no newline translation).
void write_text_file(const std::string& path, const std::string& content);

// CSV: bin_lo,bin_hi,count
void write_histogram_csv(const std::string& path, const EntropyHistogram& hist);

// CSV: bin_lo,bin_hi,count,mean_jsd — mean_jsd left empty for empty bins.
void write_binned_jsd_csv(const std::string& path, const BinnedJsd& binned);

struct SweepRow {
  double value = 0.0;
  bool feasible = true;
  bool entropy_matched = false;
  std::optional<double> kl;
  std::optional<double> jsd;
  std::optional<double> mean_entropy;
};

// CSV: value,kl,jsd,mean_entropy,feasible,entropy_matched — metric
// columns left empty for infeasible grid points.
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

struct SimulateRow {
  std::string strategy;
  BudgetPlan plan;
  std::uint64_t seed = 0;
  MetricsReport report;
};

// CSV: strategy,budget,n_single,n_multi,k_way,seed followed by the seven
// metric columns.
void write_simulate_csv(const std::string& path, const std::vector<SimulateRow>& rows);

struct DynamicsCsvRow {
  std::string uid;
  DynamicsRow stats;
};

// CSV: uid,mean_gold_prob,std_gold_prob (per training example).
void write_dynamics_csv(const std::string& path, const std::vector<DynamicsCsvRow>& rows);

}  // namespace labeldist
