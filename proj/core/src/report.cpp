#include "labeldist/report.hpp"

#include <cstdio>
#include <fstream>

#include "labeldist/errors.hpp"

namespace labeldist {

namespace {

std::string format_u64(std::uint64_t value) {
  return std::to_string(static_cast<unsigned long long>(value));
}

}  // namespace

std::string format_fixed6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

void ReportDoc::add(const std::string& key, double value) {
  body_ += key;
  body_ += ' ';
  body_ += format_fixed6(value);
  body_ += '\n';
}

void ReportDoc::add_int(const std::string& key, std::int64_t value) {
  body_ += key;
  body_ += ' ';
  body_ += std::to_string(value);
  body_ += '\n';
}

void ReportDoc::add_text(const std::string& key, const std::string& value) {
  body_ += key;
  body_ += ' ';
  body_ += value;
  body_ += '\n';
}

void add_metrics(ReportDoc& doc, const MetricsReport& report) {
  doc.add("jsd", report.jsd);
  doc.add("kl", report.kl);
  doc.add("acc_old", report.acc_old);
  doc.add("acc_new", report.acc_new);
  doc.add("entropy", report.mean_entropy);
  doc.add_int("n", report.n_examples);
  doc.add("min_extreme_prob", report.min_extreme_prob);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw InputError("failed while writing '" + path + "'");
}

void write_histogram_csv(const std::string& path, const EntropyHistogram& hist) {
  std::string body = "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    body += format_fixed6(hist.edges[i]);
    body += ',';
    body += format_fixed6(hist.edges[i + 1]);
    body += ',';
    body += std::to_string(hist.counts[i]);
    body += '\n';
  }
  write_text_file(path, body);
}

void write_binned_jsd_csv(const std::string& path, const BinnedJsd& binned) {
  std::string body = "bin_lo,bin_hi,count,mean_jsd\n";
  for (std::size_t i = 0; i < binned.counts.size(); ++i) {
    body += format_fixed6(binned.edges[i]);
    body += ',';
    body += format_fixed6(binned.edges[i + 1]);
    body += ',';
    body += std::to_string(binned.counts[i]);
    body += ',';
    if (binned.mean_jsd[i].has_value()) body += format_fixed6(*binned.mean_jsd[i]);
    body += '\n';
  }
  write_text_file(path, body);
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  std::string body = "value,kl,jsd,mean_entropy,feasible,entropy_matched\n";
  for (const SweepRow& row : rows) {
    body += format_fixed6(row.value);
    body += ',';
    if (row.kl.has_value()) body += format_fixed6(*row.kl);
    body += ',';
    if (row.jsd.has_value()) body += format_fixed6(*row.jsd);
    body += ',';
    if (row.mean_entropy.has_value()) body += format_fixed6(*row.mean_entropy);
    body += ',';
    body += row.feasible ? '1' : '0';
    body += ',';
    body += row.entropy_matched ? '1' : '0';
    body += '\n';
  }
  write_text_file(path, body);
}

void write_simulate_csv(const std::string& path, const std::vector<SimulateRow>& rows) {
  std::string body =
      "strategy,budget,n_single,n_multi,k_way,seed,"
      "jsd,kl,acc_old,acc_new,entropy,n,min_extreme_prob\n";
  for (const SimulateRow& row : rows) {
    body += row.strategy;
    body += ',';
    body += std::to_string(row.plan.budget);
    body += ',';
    body += std::to_string(row.plan.n_single);
    body += ',';
    body += std::to_string(row.plan.n_multi);
    body += ',';
    body += std::to_string(row.plan.k_way);
    body += ',';
    body += format_u64(row.seed);
    body += ',';
    body += format_fixed6(row.report.jsd);
    body += ',';
    body += format_fixed6(row.report.kl);
    body += ',';
    body += format_fixed6(row.report.acc_old);
    body += ',';
    body += format_fixed6(row.report.acc_new);
    body += ',';
    body += format_fixed6(row.report.mean_entropy);
    body += ',';
    body += std::to_string(row.report.n_examples);
    body += ',';
    body += format_fixed6(row.report.min_extreme_prob);
    body += '\n';
  }
  write_text_file(path, body);
}

void write_dynamics_csv(const std::string& path, const std::vector<DynamicsCsvRow>& rows) {
  std::string body = "uid,mean_gold_prob,std_gold_prob\n";
  for (const DynamicsCsvRow& row : rows) {
    body += row.uid;
    body += ',';
    body += format_fixed6(row.stats.mean_gold_prob);
    body += ',';
    body += format_fixed6(row.stats.std_gold_prob);
    body += '\n';
  }
  write_text_file(path, body);
}

}  // namespace labeldist
